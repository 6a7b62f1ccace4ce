#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace aoa::test {

// Runs named acceptance criteria and prints one pass/fail line each.
class AcceptanceRunner {
public:
    void run(const std::string& name, const std::function<bool(std::string&)>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures_;
    }

    int failures() const { return failures_; }

    int exit_code() const {
        std::printf(failures_ == 0 ? "acceptance: all criteria passed\n"
                                   : "acceptance: %d criterion(s) failed\n",
                    failures_);
        return failures_ == 0 ? 0 : 1;
    }

private:
    int failures_ = 0;
};

} // namespace aoa::test
