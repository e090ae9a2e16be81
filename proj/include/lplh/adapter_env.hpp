#pragma once

#include "lplh/env.hpp"

#include <string>

namespace lplh {

// Drives an external game engine over child-process stdio with line-delimited
// JSON. Requests: {"type":"reset"} | {"type":"step","command":"..."};
// responses: {"observation":...,"score":int,"moves":int,"done":bool}.
class AdapterEnv final : public Environment {
public:
    // command_line is run through /bin/sh. timeout applies per response.
    explicit AdapterEnv(std::string command_line, int timeout_ms = 30000);
    ~AdapterEnv() override;

    AdapterEnv(const AdapterEnv&) = delete;
    AdapterEnv& operator=(const AdapterEnv&) = delete;

    StepOutcome reset(uint64_t seed) override;
    StepOutcome step(const std::string& command) override;
    std::string fixture_id() const override { return "adapter:" + command_line_; }

private:
    void launch();
    void shutdown();
    std::string request(const std::string& line);
    StepOutcome to_outcome(const std::string& response_line);

    std::string command_line_;
    int timeout_ms_;
    int child_pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string read_buffer_;
    int last_score_ = 0;
    bool terminal_ = true;
};

} // namespace lplh
