#pragma once

#include <memory>
#include <string>

#include "ltcalc/code.hpp"

namespace ltcalc {

// Type-0 terms: numerals, bounded type-0 variables, and bits x(k) of a
// type-1 object (a quantified type-1 variable or an embedded code).
struct Term {
    enum class Kind { Literal, Var, Bit };

    Kind kind = Kind::Literal;
    std::size_t literal = 0;
    std::string var;                     // Kind::Var
    std::string object;                  // Kind::Bit: type-1 variable or code name
    std::shared_ptr<const Term> index;   // Kind::Bit

    static Term lit(std::size_t n);
    static Term v0(std::string name);
    static Term bit(std::string object, Term index);
};

// AST of normal ℒ-formulas: an alternating type-1 prefix over an arithmetic
// matrix with bounded type-0 quantifiers and table-driven atoms.
struct Formula {
    enum class Kind { Atom, Not, And, Or, Quant0, Quant1 };

    Kind kind = Kind::Atom;
    std::string rel;                 // Atom
    std::vector<Term> args;          // Atom
    std::vector<std::shared_ptr<const Formula>> children;  // Not/And/Or
    bool exists = true;              // Quant0/Quant1
    std::string var;                 // Quant0/Quant1
    std::size_t bound = 0;           // Quant0
    std::shared_ptr<const Formula> body;  // Quant0/Quant1
};

using FormulaPtr = std::shared_ptr<const Formula>;

FormulaPtr atom(std::string rel, std::vector<Term> args);
FormulaPtr lnot(FormulaPtr f);
FormulaPtr land(std::vector<FormulaPtr> fs);
FormulaPtr lor(std::vector<FormulaPtr> fs);
FormulaPtr quant0(bool exists, std::string var, std::size_t bound, FormulaPtr body);
FormulaPtr quant1(bool exists, std::string var, FormulaPtr body);

// An n-ary relation given as an explicit table on [0, bound)^n; tuples
// outside the declared bound are not related.
struct RelTable {
    std::size_t arity = 0;
    std::size_t bound = 0;
    std::set<std::vector<std::size_t>> tuples;
};

// A closed formula with its sidecar tables: embedded codes by name and
// non-builtin relations by name. Builtin relations: eq, ne, lt, le.
struct FormulaDoc {
    FormulaPtr root;
    std::map<std::string, CcfCode> codes;
    std::map<std::string, RelTable> rels;
};

struct Classification {
    enum class Kind { Arithmetic, Sigma, Pi };
    Kind kind = Kind::Arithmetic;
    std::size_t n = 0;
};

// Classifies by the prefix shape; rejects non-normal formulas (broken
// alternation, type-1 quantifier inside the matrix, unbound variables).
Classification classify(const FormulaDoc& doc);

// φ⁻: dualize the type-1 prefix and push the negation to the atoms.
// negate(negate(φ)) is structurally φ.
FormulaDoc negate(const FormulaDoc& doc);

// |φ|: union of the bases of the codes occurring in the formula.
IndexSet support(const FormulaDoc& doc);

// Finite-support self-inverse permutation of indices.
class Permutation {
public:
    Permutation() = default;
    // Builds h from disjoint transpositions; validates h = h⁻¹.
    static Permutation from_swaps(const std::vector<std::pair<int, int>>& swaps);

    int operator()(int xi) const;
    IndexSet map(const IndexSet& b) const;
    IndexSet domain() const;

    BrickPoint act(const BrickPoint& x) const;
    Multitree act(const Multitree& t) const;
    CcfCode act(const CcfCode& c) const;
    FormulaDoc act(const FormulaDoc& doc) const;

private:
    std::map<int, int> moved_;
};

// Evaluates a closed arithmetic formula at a point deep enough for every
// embedded code.
bool eval_closed(const FormulaDoc& doc, const BrickPoint& x);

// Def 20.1(I): T forc φ for arithmetic φ — φ[x] holds for every x ∈ [T],
// decided exhaustively at the joint dependence depth.
bool forc_base(const Multitree& t, const FormulaDoc& doc);

// Def 20.1(II) as witness checking: substitutes the supplied code for the
// leading ∃-quantified type-1 variable and delegates to forc_base. The
// witness is checked, never searched.
bool forc_exists_witness(const Multitree& t, const FormulaDoc& doc, const CcfCode& witness);

}  // namespace ltcalc
