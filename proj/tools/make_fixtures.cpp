// Generates the 25-instance offline evaluation fixture: a native corpus plus
// the scripted-model rules that drive question analysis and reading in every
// recorded mode. Instances are split across answer depths so the hop buckets,
// escalation paths, fallback and entity search variants all occur:
//
//   0-14  answered at hop 1
//   15-16 answered at hop 1 with a wrong answer (EM < 100)
//   17-19 answered at hop 2 via a shared-label bridge (19 carries passages)
//   20    answered at hop 3 via a passage linked off the bridged row
//   21    unanswerable until the full-context fallback
//   22    no semantic match at all -> immediate full-context fallback
//   23    question entity lives in the passage entity pool, not the table
//   24    mapped header misses; the match widens to the whole table
//
// Every bridged table also gives non-escalating instances extra rows and
// passages that only union/full contexts include, which is what separates
// per-mode token usage.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hygraph/corpus.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace hygraph;

namespace {

constexpr int kRows = 8;
constexpr int kInstances = 25;
constexpr int kFillerLong = 5;  // filler sentences per bridged-row passage
constexpr int kFillerPlain = 2; // filler sentences per unlinked-row passage

const char* kAlbumFirst[25] = {"Velvet", "Amber",   "Crimson", "Hollow",  "Silver",
                               "Midnight", "Paper", "Glass",   "Winter",  "Copper",
                               "Violet", "Ashen",   "Golden",  "Quiet",   "Scarlet",
                               "Ivory",  "Emerald", "Umber",   "Lunar",   "Coral",
                               "Saffron", "Indigo", "Maple",   "Cobalt",  "Garnet"};
const char* kAlbumSecond[8] = {"Morning", "Harvest", "Lantern", "Compass",
                               "Meadow",  "Anthem",  "Orchard", "Horizon"};
const char* kArtistFirst[23] = {"Nora",   "Felix",  "Imogen", "Caleb",  "Sylvia", "Dorian",
                                "Maren",  "Otis",   "Petra",  "Lionel", "Ingrid", "Hugo",
                                "Odette", "Rufus",  "Celia",  "Edmund", "Freya",  "Gideon",
                                "Helena", "Ivor",   "Juniper", "Kasper", "Leona"};
const char* kArtistLast[9] = {"Kettle", "Marsh", "Valetta", "Brink", "Soler",
                              "Hart",   "Quill", "Ostrand", "Vane"};
const char* kLabelFirst[5] = {"Grand", "Northern", "Bluegate", "Stonebridge", "Copperline"};
const char* kLabelSecond[5] = {"Harbor", "Meridian", "Crescent", "Beacon", "Summit"};

// Deliberately free of capitalized interior words, digits and dates so the
// rule-based entity pass stays quiet on them.
const char* kFiller[8] = {
    "The sessions ran for two winters in a converted chapel near the coast.",
    "Reviewers praised the pacing and the quiet confidence of the closing suite.",
    "One limited pressing sold steadily without ever troubling the charts.",
    "The band rehearsed the material on a barge moored outside the harbor.",
    "Much of the percussion was recorded in a stairwell with a single microphone.",
    "The cover art reuses a watercolor the singer bought at a flea market.",
    "Touring behind the record was brief, with only a dozen club dates.",
    "One remastered edition followed years later with three rehearsal takes appended.",
};

std::string album_name(int i, int r) {
    int k = i * kRows + r;
    return std::string(kAlbumFirst[k % 25]) + " " + kAlbumSecond[k / 25];
}

std::string artist_name(int i, int r) {
    int k = i * kRows + r;
    return std::string(kArtistFirst[k % 23]) + " " + kArtistLast[k / 23];
}

std::string label_name(int i) {
    return std::string(kLabelFirst[i % 5]) + " " + kLabelSecond[i / 5] + " Records";
}

int year_of(int r) { return 1991 + r; }

Cell make_cell(int r, int c, std::string text, std::vector<std::string> links = {}) {
    Cell cell;
    cell.row_index = r;
    cell.header_index = c;
    cell.text = std::move(text);
    cell.linked_doc_ids = std::move(links);
    return cell;
}

// Bridge geometry shared by every instance: the row the question starts in,
// the two rows reachable only through the shared record label, and one row
// that stays unreachable from the seed component.
struct Geometry {
    int seed, bridge_a, bridge_b, unreachable;
};

Geometry geometry(int i) {
    int s = i % kRows;
    return {s, (s + 3) % kRows, (s + 5) % kRows, (s + 1) % kRows};
}

TableTextInstance base_instance(int i, bool with_bridge) {
    Geometry g = geometry(i);
    TableTextInstance inst;
    inst.question_id = "s25-" + std::to_string(i);
    inst.table.table_id = "t" + std::to_string(i);
    inst.table.name = "Albums chart " + std::to_string(i + 1);
    inst.table.headers = {"Rank", "Album", "Artist", "Year"};
    for (int r = 0; r < kRows; ++r) {
        std::string alb = album_name(i, r);
        std::string art = artist_name(i, r);
        std::string did = "d" + std::to_string(i) + "_" + std::to_string(r);

        Row row;
        row.cells.push_back(make_cell(r, 0, std::to_string(r + 1)));
        row.cells.push_back(make_cell(r, 1, alb, {did}));
        row.cells.push_back(make_cell(r, 2, art));
        row.cells.push_back(make_cell(r, 3, std::to_string(year_of(r))));
        inst.table.rows.push_back(std::move(row));

        std::string text = alb + " is a studio album by " + art + ", released in " +
                           std::to_string(year_of(r)) + ".";
        if (with_bridge && r == g.seed)
            text += " The record came out through " + label_name(i) + ".";
        if (with_bridge && (r == g.bridge_a || r == g.bridge_b)) {
            text += " It was issued through " + label_name(i) + " after a long negotiation.";
            for (int f = 0; f < kFillerLong; ++f) text += std::string(" ") + kFiller[f];
        } else if (!(with_bridge && r == g.seed)) {
            // Padding that only full contexts ever see.
            for (int f = 0; f < kFillerPlain; ++f)
                text += std::string(" ") + kFiller[(r + f) % 8];
        }
        inst.documents[did] = Document{did, alb, text};
    }
    return inst;
}

ordered_json rule(const std::string& purpose, const std::vector<std::string>& contains,
                  const std::string& response) {
    return ordered_json{{"purpose", purpose}, {"contains", contains}, {"response", response}};
}

std::string list_reply(const std::string& tag, const std::vector<std::string>& items) {
    return tag + " " + ordered_json(items).dump();
}

std::string mapping_reply(const std::vector<std::pair<std::string, std::vector<std::string>>>& m) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j.dump();
}

// The three analysis-stage rules every odyssey-mode run issues.
void push_analysis(std::vector<ordered_json>& rules, const std::string& q,
                   const std::vector<std::string>& entities,
                   const std::vector<std::string>& headers,
                   const std::vector<std::pair<std::string, std::vector<std::string>>>& mapping) {
    rules.push_back(rule("entity_extract", {q}, list_reply("Entities:", entities)));
    rules.push_back(rule("header_select", {q}, list_reply("Relevant headers:", headers)));
    rules.push_back(rule("entity_map", {q}, mapping_reply(mapping)));
}

// Hand-built 2004 United States Grand Prix corpus: a 20-row result table
// with three driver passages. Position 4 is Jenson Button, whose passage
// carries his nationality; the Montoya passage shares the "British" entity,
// which bridges the two driver rows inside the graph.
void make_grand_prix(const std::string& out_dir) {
    TableTextInstance inst;
    inst.question_id = "a2-0";
    inst.question = "The driver who finished in position 4 in the 2004 United States Grand "
                    "Prix was of what nationality ?";
    inst.gold_answers = {"British"};
    inst.table.table_id = "2004_United_States_Grand_Prix";
    inst.table.name = "2004 United States Grand Prix";
    inst.table.headers = {"Pos", "Driver", "Constructor", "Time", "Gap"};

    struct Entry {
        const char* driver;
        const char* constructor;
        const char* time;
        const char* gap;
        const char* doc; // linked document id, or nullptr
    };
    const Entry entries[20] = {
        {"Michael Schumacher", "Ferrari", "1:40:29.914", "0.000", "Michael_Schumacher"},
        {"Rubens Barrichello", "Ferrari", "+2.950", "2.950", nullptr},
        {"Takuma Sato", "BAR-Honda", "+22.036", "22.036", nullptr},
        {"Jenson Button", "BAR-Honda", "+1:09.766", "1:09.766", "Jenson_Button"},
        {"Juan Pablo Montoya", "Williams-BMW", "+1 Lap", "1 Lap", "Juan_Pablo_Montoya"},
        {"Kimi Raikkonen", "McLaren-Mercedes", "+1 Lap", "1 Lap", nullptr},
        {"Olivier Panis", "Toyota", "+2 Laps", "2 Laps", nullptr},
        {"Antonio Pizzonia", "Jaguar-Cosworth", "+2 Laps", "2 Laps", nullptr},
        {"Mark Webber", "Jaguar-Cosworth", "+3 Laps", "3 Laps", nullptr},
        {"Giancarlo Fisichella", "Sauber-Petronas", "+3 Laps", "3 Laps", nullptr},
        {"Fernando Alonso", "Renault", "Retired", "Accident", nullptr},
        {"Jarno Trulli", "Renault", "Retired", "Engine", nullptr},
        {"David Coulthard", "McLaren-Mercedes", "Retired", "Gearbox", nullptr},
        {"Felipe Massa", "Sauber-Petronas", "Retired", "Spin", nullptr},
        {"Cristiano da Matta", "Toyota", "Retired", "Clutch", nullptr},
        {"Gianmaria Bruni", "Minardi-Cosworth", "Retired", "Hydraulics", nullptr},
        {"Zsolt Baumgartner", "Minardi-Cosworth", "+5 Laps", "5 Laps", nullptr},
        {"Christian Klien", "Jaguar-Cosworth", "Retired", "Suspension", nullptr},
        {"Nick Heidfeld", "Jordan-Ford", "Retired", "Brakes", nullptr},
        {"Giorgio Pantano", "Jordan-Ford", "Retired", "Wheel", nullptr},
    };
    for (int r = 0; r < 20; ++r) {
        const Entry& e = entries[r];
        Row row;
        row.cells.push_back(make_cell(r, 0, std::to_string(r + 1)));
        row.cells.push_back(make_cell(
            r, 1, e.driver,
            e.doc ? std::vector<std::string>{e.doc} : std::vector<std::string>{}));
        row.cells.push_back(make_cell(r, 2, e.constructor));
        row.cells.push_back(make_cell(r, 3, e.time));
        row.cells.push_back(make_cell(r, 4, e.gap));
        inst.table.rows.push_back(std::move(row));
    }

    inst.documents["Michael_Schumacher"] = Document{
        "Michael_Schumacher", "Michael Schumacher",
        "Michael Schumacher ( born 3 January 1969 ) is a retired German racing driver who "
        "raced in Formula One for Jordan Grand Prix , Benetton and Ferrari , where he spent "
        "most of his career , as well as for Mercedes upon his return to the sport . Widely "
        "regarded as one of the greatest Formula One drivers ever , and regarded by some as "
        "the greatest of all time , Schumacher is the only driver in history to win seven "
        "Formula One World Championships , five of which he won consecutively ."};
    inst.documents["Jenson_Button"] = Document{
        "Jenson_Button", "Jenson Button",
        "Jenson Alexander Lyons Button MBE ( born 19 January 1980 ) is a British racing "
        "driver and former Formula One driver . He won the 2009 Formula One World "
        "Championship , driving for Brawn GP . He currently competes in the Japanese Super "
        "GT Series driving a Honda NSX-GT for Team Kunimitsu , in which he won the title in "
        "2018 . Button began karting at the age of eight and achieved early success ."};
    inst.documents["Juan_Pablo_Montoya"] = Document{
        "Juan_Pablo_Montoya", "Juan Pablo Montoya",
        "Juan Pablo Montoya ( born 20 September 1975 ) is a Colombian racing driver . He "
        "drove for the British team Williams for six seasons , taking seven victories ."};

    save_corpus_native({inst}, out_dir + "/a2_grand_prix.jsonl");

    std::vector<ordered_json> rules;
    rules.push_back(rule(
        "entity_extract", {inst.question},
        "Entities: ['driver', 'position 4', '2004 United States Grand Prix', 'nationality']"));
    rules.push_back(
        rule("header_select", {inst.question}, "Relevant headers: ['Pos', 'Driver']"));
    rules.push_back(rule("entity_map", {inst.question},
                         mapping_reply({{"driver", {"Driver"}},
                                        {"position 4", {"Pos"}},
                                        {"2004 United States Grand Prix", {"Others"}},
                                        {"nationality", {"Others"}}})));
    rules.push_back(rule("reader|baseline", {inst.question, "British racing driver"},
                         "Final Answer: British"));
    rules.push_back(rule("reader|baseline", {inst.question}, "Final Answer: British"));

    ordered_json script;
    script["rules"] = rules;
    std::ofstream(out_dir + "/a2_script.json", std::ios::trunc) << script.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    std::string out_dir = argc > 1 ? argv[1] : "fixtures";
    fs::create_directories(out_dir);
    make_grand_prix(out_dir);

    std::vector<TableTextInstance> corpus;
    std::vector<ordered_json> rules;
    const std::vector<std::string> kAllHeaders = {"Album", "Artist", "Year"};

    for (int i = 0; i < kInstances; ++i) {
        Geometry g = geometry(i);
        std::string alb = album_name(i, g.seed);
        std::string art = artist_name(i, g.seed);
        std::string year = std::to_string(year_of(g.seed));

        if (i <= 16) {
            // Hop-1 answers; 15 and 16 answer wrongly on purpose.
            TableTextInstance inst = base_instance(i, true);
            inst.question =
                "Which artist recorded the album " + alb + " released in " + year + "?";
            inst.gold_answers = {art};
            if (i == 5) inst.gold_answers.push_back(art.substr(art.find(' ') + 1));
            push_analysis(rules, inst.question, {alb, year}, kAllHeaders,
                          {{alb, {"Album"}}, {year, {"Year"}}});
            std::string answer = art;
            if (i == 15) answer = "The renowned " + art;
            if (i == 16) answer = "unknown performer";
            rules.push_back(rule("reader|baseline", {inst.question}, "Final Answer: " + answer));
            corpus.push_back(std::move(inst));
        } else if (i <= 19) {
            // Hop-2 answers across the label bridge; 19 narrows carried passages.
            TableTextInstance inst = base_instance(i, true);
            std::string bridged_alb = album_name(i, g.bridge_a);
            std::string bridged_art = artist_name(i, g.bridge_a);
            inst.question =
                "Which artist released an album through the same label as " + alb + "?";
            inst.gold_answers = {bridged_art};
            push_analysis(rules, inst.question, {alb}, kAllHeaders, {{alb, {"Album"}}});
            rules.push_back(rule("reader|baseline", {inst.question, bridged_alb},
                                 "Final Answer: " + bridged_art));
            std::string none_reply = "Final Answer: None";
            if (i == 19)
                none_reply += "\nRelevant Passages: [\"" + bridged_alb + "\"]";
            rules.push_back(rule("reader|baseline", {inst.question}, none_reply));
            corpus.push_back(std::move(inst));
        } else if (i == 20) {
            // Hop-3 answer: the year passage hangs off the bridged row's year
            // cell, so it enters the context one hop after the bridged row.
            TableTextInstance inst = base_instance(i, true);
            std::string ydoc = "y" + std::to_string(i);
            int yb = year_of(g.bridge_a);
            inst.table.rows[g.bridge_a].cells[3].linked_doc_ids.push_back(ydoc);
            inst.documents[ydoc] = Document{
                ydoc, std::to_string(yb) + " in music",
                "In " + std::to_string(yb) +
                    " the export market held steady for most of the year. The season closed "
                    "with a diamond certification awarded for an independent release."};
            inst.question =
                "What certification milestone followed the label debut of " + alb + "?";
            inst.gold_answers = {"diamond certification"};
            push_analysis(rules, inst.question, {alb}, kAllHeaders, {{alb, {"Album"}}});
            rules.push_back(rule("reader|baseline", {inst.question, "diamond certification"},
                                 "Final Answer: a diamond certification"));
            rules.push_back(rule("reader|baseline", {inst.question}, "Final Answer: None"));
            corpus.push_back(std::move(inst));
        } else if (i == 21) {
            // Marker lives in an unlinked row's passage: only the full context
            // surfaces it, so every hop escalates and the fallback answers.
            TableTextInstance inst = base_instance(i, false);
            std::string vault_art = artist_name(i, g.unreachable);
            std::string did = "d" + std::to_string(i) + "_" + std::to_string(g.unreachable);
            inst.documents[did].text +=
                " The master tapes were archived in the hermitage vault by a private collector.";
            inst.question = "Which artist from the chart of " + alb +
                            " had master tapes stored away by a collector?";
            inst.gold_answers = {vault_art};
            push_analysis(rules, inst.question, {alb}, kAllHeaders, {{alb, {"Album"}}});
            rules.push_back(
                rule("reader|baseline", {inst.question, "hermitage vault"}, "Final Answer: " + vault_art));
            rules.push_back(rule("reader|baseline", {inst.question}, "Final Answer: None"));
            corpus.push_back(std::move(inst));
        } else if (i == 22) {
            // The extracted entity matches nothing anywhere, so matching fails
            // and the run goes straight to the full context.
            TableTextInstance inst = base_instance(i, true);
            inst.question = "What rank did the album Phantom Ledger reach on the chart that "
                            "includes " + alb + "?";
            inst.gold_answers = {"not listed"};
            push_analysis(rules, inst.question, {"Phantom Ledger"}, kAllHeaders,
                          {{"Phantom Ledger", {"Album"}}});
            rules.push_back(rule("reader|baseline", {inst.question}, "Final Answer: not listed"));
            corpus.push_back(std::move(inst));
        } else if (i == 23) {
            // Question entity is the record label, which only exists in the
            // passage entity pool; the match runs over that pool instead.
            TableTextInstance inst = base_instance(i, true);
            std::string label = label_name(i);
            inst.question = "Which charting album was issued through " + label + "?";
            inst.gold_answers = {alb};
            push_analysis(rules, inst.question, {label}, kAllHeaders, {{label, {"Others"}}});
            rules.push_back(rule("reader|baseline", {inst.question}, "Final Answer: " + alb));
            corpus.push_back(std::move(inst));
        } else {
            // Mapped header misses; matching widens to all table columns and
            // finds the artist cell, pulling the artist column into the table.
            TableTextInstance inst = base_instance(i, true);
            inst.question = "Which album did " + art + " put out?";
            inst.gold_answers = {alb};
            push_analysis(rules, inst.question, {art}, {"Album", "Year"}, {{art, {"Album"}}});
            rules.push_back(rule("reader|baseline", {inst.question}, "Final Answer: " + alb));
            corpus.push_back(std::move(inst));
        }
    }

    save_corpus_native(corpus, out_dir + "/sample25.jsonl");

    ordered_json script;
    script["rules"] = rules;
    std::ofstream(out_dir + "/sample25_script.json", std::ios::trunc) << script.dump(2) << '\n';

    std::cout << "wrote " << corpus.size() << " instances and " << rules.size()
              << " script rules to " << out_dir << '\n';
    return 0;
}
