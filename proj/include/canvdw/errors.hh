/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_ERRORS_HH
#define CANVDW_GUARD_ERRORS_HH 1

#include <stdexcept>
#include <string>

namespace canvdw
{
    /// A caller passed an argument outside the documented domain.
    class InvalidParameter : public std::invalid_argument
    {
    public:
        explicit InvalidParameter(const std::string & what) :
            std::invalid_argument(what)
        {
        }
    };

    /// An operation was called on an input that breaks its precondition,
    /// e.g. merging a colouring that is not alpha-bounded.
    class PreconditionViolation : public std::logic_error
    {
    public:
        explicit PreconditionViolation(const std::string & what) :
            std::logic_error(what)
        {
        }
    };

    /// An explicitly budgeted search ran out of nodes.
    class BudgetExceeded : public std::runtime_error
    {
    public:
        explicit BudgetExceeded(const std::string & what) :
            std::runtime_error(what)
        {
        }
    };
}

#endif
