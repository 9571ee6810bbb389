#ifndef TIMEXEC_ERRORS_HPP
#define TIMEXEC_ERRORS_HPP

#include <stdexcept>

namespace timexec {

// Numerical breakdown inside a solver: singular saddle system, failed
// Cholesky certificate, active-set iteration cap. Distinct from
// std::domain_error, which flags arguments outside an operation's
// mathematical domain.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Constraint set admits no point satisfying the budget 1'x = x0.
class infeasible_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested combination is recognized but intentionally unsupported
// (e.g. a closed form that only exists for one kernel family).
class not_implemented_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Scenario configuration could not be parsed or failed validation.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}

#endif
