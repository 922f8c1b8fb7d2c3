#pragma once

#include <stdexcept>
#include <string>

namespace reclab {

// Input or argument violates an operation's precondition. The CLI maps this
// to exit code 2.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A search ran into its time horizon before producing what was asked for.
// The CLI maps this to exit code 3.
class HorizonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace reclab
