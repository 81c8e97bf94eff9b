#pragma once
// Deterministic stand-in for a chat completions endpoint. A script is an
// ordered rule list; the first rule whose purpose matches and whose
// `contains` snippets all appear in the prompt wins. Used to record
// reproducible fixture caches without network access.

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hygraph/llm_gateway.hpp"

namespace hygraph {

struct ScriptRule {
    std::string purpose; // empty matches any; "a|b" matches either
    std::vector<std::string> contains; // all must occur in the prompt
    std::string response;
    int uses = -1; // -1 = unlimited
};

class ScriptedTransport : public Transport {
public:
    explicit ScriptedTransport(std::vector<ScriptRule> rules,
                               std::optional<std::string> default_response = std::nullopt);

    // Script file: {"rules": [...], "default_response": "..."?}
    static std::shared_ptr<ScriptedTransport> from_file(const std::string& path);

    TransportResponse send(const TransportRequest& req) override;

private:
    std::vector<ScriptRule> rules_;
    std::optional<std::string> default_response_;
    std::mutex mu_;
};

} // namespace hygraph
