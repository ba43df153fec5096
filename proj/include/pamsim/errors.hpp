#pragma once
#include <stdexcept>
#include <string>

namespace pamsim {

// Error classes map to CLI exit codes (see README).
struct Error : std::runtime_error {
    Error(std::string msg, int code) : std::runtime_error(std::move(msg)), exit_code(code) {}
    int exit_code;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config: " + msg, 2) {}
};

struct InfeasiblePlanError : Error {
    explicit InfeasiblePlanError(const std::string& msg) : Error("plan: " + msg, 3) {}
};

struct SyncFailure : Error {
    explicit SyncFailure(const std::string& msg) : Error("sync: " + msg, 4) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error("numerical: " + msg, 5) {}
};

} // namespace pamsim
