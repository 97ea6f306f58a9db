#ifndef PITA_ERROR_HPP
#define PITA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pita {

// Fatal simulation invariant violation. Carries the name of the violated
// invariant so the CLI can report it and exit with code 2.
struct SimError : std::runtime_error {
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

#define PITA_CHECK(cond, msg)                                              \
    do {                                                                   \
        if (!(cond)) throw ::pita::SimError(std::string("invariant: ") + (msg)); \
    } while (0)

} // namespace pita

#endif
