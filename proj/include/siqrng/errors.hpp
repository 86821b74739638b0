#pragma once

#include <stdexcept>
#include <string>

namespace siqrng {

// A numeric field is outside its documented range.
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The input is valid but the requested quantity is undefined for it
// (e.g. a QBER with no X-basis clicks at all).
class degenerate_input : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numeric search could not meet its target anywhere in its domain.
class no_solution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File / stream level failure (missing file, bad magic, truncated payload).
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace siqrng
