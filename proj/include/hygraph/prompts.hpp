#pragma once
// Prompt templates and a tiny {slot} renderer. Templates are fixed strings;
// changing them invalidates recorded caches, so treat edits like schema
// migrations.

#include <map>
#include <string>
#include <string_view>

namespace hygraph::prompts {

// Replaces every {name} placeholder using the map. Throws
// std::invalid_argument if a placeholder has no value.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& slots);

// Question analysis stages. Slots: {question} {table_id} {table_headers}
// (+ {entities}, {relevant_headers} for the later stages).
std::string_view entity_extraction();
std::string_view header_selection();
std::string_view entity_mapping();

// Reader calls. Slots: {table_data} {passages} {question}.
std::string_view reader_main();
std::string_view reader_baseline();

// Closed-book baseline. Slot: {question}.
std::string_view reader_question_only();

// Summarization baselines. Slots: {table} / {text}.
std::string_view summarize_table();
std::string_view summarize_passage();

// Entity listing over a passage. Slot: {text}.
std::string_view ner();

} // namespace hygraph::prompts
