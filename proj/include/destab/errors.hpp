#ifndef DESTAB_ERRORS_HPP
#define DESTAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace destab {

/* Error taxonomy. CLI maps TruncationInsufficient to exit code 2,
   everything else here to exit code 1. */

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Requested degree range exceeds what the input module's bound supports. */
struct TruncationInsufficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotUnstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* d_in followed by d_out is nonzero, so homology is undefined. */
struct CompositeNonzero : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotACycle : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* The two computation routes for the L functor disagree. */
struct RouteMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Homology of page 2^s does not reproduce page 2^{s+1}. */
struct PageMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* The restriction map fails to be monic where the page-homology formula needs it. */
struct DiamondViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* No module in the built-in catalogue under that name. */
struct UnknownName : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace destab

#endif
