#include "hygraph/prompts.hpp"

#include <stdexcept>

namespace hygraph::prompts {

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    size_t i = 0;
    while (i < tmpl.size()) {
        char c = tmpl[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        size_t close = tmpl.find('}', i + 1);
        if (close == std::string_view::npos)
            throw std::invalid_argument("unterminated placeholder in template");
        std::string name(tmpl.substr(i + 1, close - i - 1));
        auto it = slots.find(name);
        if (it == slots.end())
            throw std::invalid_argument("no value for placeholder {" + name + "}");
        out += it->second;
        i = close + 1;
    }
    return out;
}

std::string_view entity_extraction() {
    static constexpr std::string_view t = R"(Agent Introduction: You are an agent who is going to be assisting me in a question answering task. For this task, I need to first identify the named entities in the question.

Task: Identify the named entities in the provided question. These entities will serve as key elements for extracting pertinent information from the available sources, which include table name and its headers.

Output format:
Entities: ['<entity1>', '<entity2>', .....]

Use the below example to better understand the task

Input:
Question: What was the nickname of the gold medal winner in the men's heavyweight Greco-Roman wrestling event of the 1932 Summer Olympics?
Table Name: Sweden at the 1932 Summer Olympics
Table Headers: ["Medal", "Name", "Sport", "Event"]

Output:
Entities: ['nickname', 'medal', 'gold', "men's heavyweight", 'Greco-Roman Wrestling event', '1932 Summer Olympics']

Input:
Question: {question}
Table Name: {table_id}
Table Headers: {table_headers}

Output:
)";
    return t;
}

std::string_view header_selection() {
    static constexpr std::string_view t = R"(Agent Introduction: You are an agent who is going to be assisting me in a question answering task. I have a table as a source of information. I have already extracted the relevant entities from the question. For this task, I need to first identify the column headers that are relevant in the question.

Task: Identify the relevant column headers from the provided list, based on the extracted entities from the question. I will also provide the extracted entities from the question and name of the table.

Output format:
Relevant headers: ['<header-1>', '<header-2>', ....]

Use the below example to better understand the task

Input:
Question: What was the nickname of the gold medal winner in the men's heavyweight Greco-Roman wrestling event of the 1932 Summer Olympics?
Table Name: Sweden at the 1932 Summer Olympics
Table Headers: ["Medal", "Name", "Sport", "Event"]
Entities extracted from question: ["gold medal", "men's heavyweight", "Greco-Roman Wrestling", "1932 Summer Olympics"]

Output:
Relevant headers: ["Medal", "Name", "Sport", "Event"]

Input:
Question: {question}
Table Name: {table_id}
Table Headers: {table_headers}
Entities extracted from question: {entities}

Output:
)";
    return t;
}

std::string_view entity_mapping() {
    static constexpr std::string_view t = R"(Agent Introduction: You are an agent who is going to be assisting me in a question answering task. I have a table as a source of information. I have already extracted relevant entities from the question and relevant column headers from the table.

Task: Map the entities extracted from the question with the relevant headers and the table name.

Output format:
"<entity1>": ["<mapping1>", "<mapping2>"],
"<entity2>": ["<mapping1>"]

For each entity extracted from the question, there should be a corresponding <mapping> to an item in the 'Relevant headers' column. If none of the headers match the entity, the mapping should be labeled as "Others".

Use the below example to better understand the task

Input:
Question: What was the nickname of the gold medal winner in the men's heavyweight Greco-Roman wrestling event of the 1932 Summer Olympics?
Table Name: Sweden at the 1932 Summer Olympics
Entities extracted from question: ["gold medal", "men's heavyweight", "Greco-Roman Wrestling", "1932 Summer Olympics"]
Relevant headers: ["Medal", "Name", "Sport", "Event"]

Output:
"gold medal": ["Medal"],
"men's heavyweight": ["Event"],
"Greco-Roman Wrestling": ["Sport"],
"1932 Summer Olympics": ["Others"]

Input:
Question: {question}
Table Name: {table_id}
Entities extracted from question: {entities}
Relevant Headers: {relevant_headers}

Output:
)";
    return t;
}

std::string_view reader_main() {
    static constexpr std::string_view t = R"(Agent Introduction: Hello! I'm your Hybrid-QA expert agent, here to assist you in answering complex questions by leveraging both table data and passage information. Let's combine these sources to generate accurate and comprehensive answers!

Task: Your task involves a central question that requires information from both a table and passages.

Here's the context you'll need:

Table Data:
{table_data}

Passages:
{passages}

Question:
{question}

Final Answer: Provide the final answer in the format below. If the answer cannot be answered with the given context, provide None.

Final Answer Format:
Final Answer: <your answer>

If the final answer is "None", provide the names of passages that are relevant to the above questions. If no passages are relevant give '[]' as Relevant Passages.

Relevant Passages Format:
Relevant Passages: ['<name-of-passage1>', '<name-of-passage2>', ......]
)";
    return t;
}

std::string_view reader_baseline() {
    static constexpr std::string_view t = R"(Agent Introduction: Hello! I'm your Hybrid-QA expert agent, here to assist you in answering complex questions by leveraging both table data and passage information. Let's combine these sources to generate accurate and comprehensive answers!

Task: Your task involves a central question that requires information from both a table and passages.

Here's the context you'll need:

Table Data:
{table_data}

Passages:
{passages}

Question:
{question}

Final Answer: <your answer>
)";
    return t;
}

std::string_view reader_question_only() {
    static constexpr std::string_view t = R"(Answer the question below using your own knowledge only.

Question: {question}

Reply in the format:
Final Answer: <your answer>
)";
    return t;
}

std::string_view summarize_table() {
    static constexpr std::string_view t = R"(Agent Introduction: You are an assistant tasked with summarizing tables.

Task: I have a table that I need help summarizing. The table contains the following columns and data: {table}
Provide a concise summary of the table without removing any numbers, entities or important information. Try to retain all the important information.

Response:
)";
    return t;
}

std::string_view summarize_passage() {
    static constexpr std::string_view t = R"(Agent Introduction: You are an assistant tasked with summarizing passages.

Task: I have a passage that I need help summarizing. The passage is as follows: {text}
Provide a concise summary of the passage without removing any numbers, entities or important information. Try to retain all the important information.

Response:
)";
    return t;
}

std::string_view ner() {
    static constexpr std::string_view t = R"(List the named entities that appear in the passage below: people, organizations, places, dates, nationalities, numbers and other proper nouns.

Output format:
Entities: ['<entity1>', '<entity2>', .....]

Passage: {text}

Output:
)";
    return t;
}

} // namespace hygraph::prompts
