#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "stabfold/exterior.hpp"
#include "stabfold/ravenel.hpp"

namespace stabfold {

// Arithmetic over Lambda_n (x) F[x]:
//   expr   := [+|-] term {(+|-) term}
//   term   := factor {* factor}
//   factor := integer | x[^k] | d(expr) | name | h[i,j]h[k,l]... | (expr)
// Products are wedge products; d is the bundle differential.
class ExprParser {
public:
    ExprParser(const Complex& bundle, const std::map<std::string, PolyCochain>* names = nullptr);
    // Throws std::invalid_argument with the offending position.
    PolyCochain parse(const std::string& text) const;

private:
    const Complex* c_;
    const std::map<std::string, PolyCochain>* names_;
};

struct PresentationCheck {
    std::string kind;
    std::string statement;
    bool pass = false;
    std::string detail;
};

struct PresentationReport {
    int n = 1;
    uint64_t p = 2;
    std::vector<std::tuple<std::string, std::string, std::string>> elements; // name, h-basis form, bundle d
    std::vector<PresentationCheck> checks;
    bool ok() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Evaluates one height of a presentations fixture against the engine.
PresentationReport check_presentation(const nlohmann::json& height);

} // namespace stabfold
