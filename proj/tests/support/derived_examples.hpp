#pragma once

#include <string>
#include <vector>

namespace oracle {

struct ExampleCheck {
    enum class Mode { exact, relative, absolute, at_most };

    std::string id;
    double expected = 0.0;  // from the oracle
    double actual = 0.0;    // from the library
    Mode mode = Mode::relative;
    double tolerance = 1e-9;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] std::string describe() const;
};

/// Every worked example with a derived value, oracle first, then the library.
std::vector<ExampleCheck> derived_examples();

}  // namespace oracle
