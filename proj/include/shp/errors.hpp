#pragma once

#include <stdexcept>
#include <string>

namespace shp {

// Exit-code classes: domain errors cover caller mistakes and legitimate
// negative outcomes (bad inputs, infeasible systems, exceeded budgets);
// internal errors are invariant breaches inside the library itself.
enum class ErrClass { domain = 1, internal = 2 };

class Error : public std::runtime_error {
public:
    Error(ErrClass cls, std::string kind, std::string invariant, const std::string& msg)
        : std::runtime_error(msg), cls_(cls), kind_(std::move(kind)),
          invariant_(std::move(invariant)) {}

    ErrClass cls() const { return cls_; }
    const std::string& kind() const { return kind_; }
    const std::string& invariant() const { return invariant_; }

private:
    ErrClass cls_;
    std::string kind_;      // stable machine-readable tag, e.g. "DegenerateCone"
    std::string invariant_; // short statement of the violated invariant
};

[[noreturn]] inline void fail_validation(const std::string& kind, const std::string& invariant,
                                         const std::string& msg) {
    throw Error(ErrClass::domain, kind, invariant, msg);
}

[[noreturn]] inline void fail_runtime(const std::string& kind, const std::string& invariant,
                                      const std::string& msg) {
    throw Error(ErrClass::domain, kind, invariant, msg);
}

[[noreturn]] inline void fail_internal(const std::string& kind, const std::string& invariant,
                                       const std::string& msg) {
    throw Error(ErrClass::internal, kind, invariant, msg);
}

} // namespace shp
