#ifndef EOCT_ERROR_HPP
#define EOCT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace eoct {

// Error taxonomy shared by the core and the C API. The coarse classes
// (invalid_input, fit_failed, internal) double as process exit codes;
// the fine-grained codes all collapse to exit class 2.
enum class Errc {
    ok = 0,
    invalid_input = 2,
    fit_failed = 3,
    internal = 4,
    io = 20,
    malformed_header = 21,
    non_monotone_freq = 22,
    unit_mismatch = 23,
    bad_config = 24,
};

inline int exit_class(Errc e)
{
    switch (e) {
        case Errc::ok: return 0;
        case Errc::fit_failed: return 3;
        case Errc::internal: return 4;
        default: return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace eoct

#endif
