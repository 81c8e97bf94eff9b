#include "hygraph/scripted.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

using nlohmann::json;
using nlohmann::ordered_json;

namespace hygraph {

ScriptedTransport::ScriptedTransport(std::vector<ScriptRule> rules,
                                     std::optional<std::string> default_response)
    : rules_(std::move(rules)), default_response_(std::move(default_response)) {}

std::shared_ptr<ScriptedTransport> ScriptedTransport::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GatewayError("cannot open script file: " + path);
    json j = json::parse(in);
    std::vector<ScriptRule> rules;
    for (const json& jr : j.at("rules")) {
        ScriptRule rule;
        rule.purpose = jr.value("purpose", std::string{});
        if (jr.contains("contains"))
            rule.contains = jr.at("contains").get<std::vector<std::string>>();
        rule.response = jr.at("response").get<std::string>();
        rule.uses = jr.value("uses", -1);
        rules.push_back(std::move(rule));
    }
    std::optional<std::string> dflt;
    if (j.contains("default_response")) dflt = j.at("default_response").get<std::string>();
    return std::make_shared<ScriptedTransport>(std::move(rules), std::move(dflt));
}

static bool purpose_matches(const std::string& pattern, const std::string& purpose) {
    if (pattern.empty()) return true;
    size_t start = 0;
    while (start <= pattern.size()) {
        size_t bar = pattern.find('|', start);
        std::string alt = pattern.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
        if (alt == purpose) return true;
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return false;
}

TransportResponse ScriptedTransport::send(const TransportRequest& req) {
    std::string purpose;
    for (const auto& [k, v] : req.headers)
        if (k == "x-purpose") purpose = v;
    json body = json::parse(req.body);
    std::string prompt = body.at("messages").at(0).at("content").get<std::string>();

    std::string reply;
    bool found = false;
    {
        std::lock_guard<std::mutex> lock(mu_);
        for (auto& rule : rules_) {
            if (rule.uses == 0) continue;
            if (!purpose_matches(rule.purpose, purpose)) continue;
            bool all = true;
            for (const auto& s : rule.contains)
                if (prompt.find(s) == std::string::npos) {
                    all = false;
                    break;
                }
            if (!all) continue;
            if (rule.uses > 0) --rule.uses;
            reply = rule.response;
            found = true;
            break;
        }
    }
    if (!found) {
        if (!default_response_) {
            std::ostringstream os;
            os << "no script rule matches purpose '" << purpose << "'; prompt starts: "
               << prompt.substr(0, 160);
            throw GatewayError(os.str());
        }
        reply = *default_response_;
    }
    ordered_json out{{"choices", ordered_json::array({ordered_json{
                         {"message", ordered_json{{"role", "assistant"}, {"content", reply}}}}})}};
    return {200, out.dump()};
}

} // namespace hygraph
