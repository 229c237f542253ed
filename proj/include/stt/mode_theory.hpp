#pragma once

// The mode theory: one object, four generating modalities (flat, sharp, op,
// tw), six generating 2-cells, and the equations between them. Modalities
// are words read as composites g1 o g2 o ... o gn (leftmost outermost).

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stt {

enum class Generator : std::uint8_t { Flat = 0, Sharp = 1, Op = 2, Tw = 3 };

std::string_view generator_name(Generator g);
std::optional<Generator> generator_from_name(std::string_view s);

/// A word over the generators. The empty word is the identity modality.
/// Nothing forces a Modality to be normal; use normalize_modality or
/// compose_modalities to obtain canonical representatives.
struct Modality {
  std::vector<Generator> word;

  Modality() = default;
  Modality(std::initializer_list<Generator> gs) : word(gs) {}
  explicit Modality(std::vector<Generator> gs) : word(std::move(gs)) {}

  static Modality id() { return {}; }
  static Modality flat() { return {Generator::Flat}; }
  static Modality sharp() { return {Generator::Sharp}; }
  static Modality op() { return {Generator::Op}; }
  static Modality tw() { return {Generator::Tw}; }

  bool is_id() const { return word.empty(); }
  std::size_t size() const { return word.size(); }

  friend bool operator==(const Modality&, const Modality&) = default;
};

/// Shortlex order: shorter words first, then lexicographic by generator order.
std::strong_ordering operator<=>(const Modality& a, const Modality& b);

/// `id`, or generator names joined with `.`, e.g. `tw.flat`.
std::string to_string(const Modality& m);
/// Inverse of to_string; throws ModeError on a bad token.
Modality parse_modality(std::string_view text);

Modality normalize_modality(const Modality& m);
Modality compose_modalities(const Modality& outer, const Modality& inner);
bool eq_modality(const Modality& a, const Modality& b);
bool is_normal_modality(const Modality& m);

/// One oriented rewrite rule `lhs -> rhs` on modality words.
struct ModalityRule {
  Modality lhs;
  Modality rhs;
};
const std::vector<ModalityRule>& modality_rules();

/// A critical pair arising from an overlap of two rule left-hand sides.
struct CriticalPair {
  Modality overlap;
  Modality via_first;   // rewrite the left redex, then normalize
  Modality via_second;  // rewrite the right redex, then normalize
  bool joinable() const { return via_first == via_second; }
};
/// All critical pairs of the oriented system. Local confluence holds iff
/// every pair is joinable.
std::vector<CriticalPair> critical_pairs();

// ---------------------------------------------------------------------------
// 2-cells

enum class CellGen : std::uint8_t { Eps = 0, Zeta = 1, Tau = 2, TauInv = 3, Pi0 = 4, Pi1 = 5 };

std::string_view cell_gen_name(CellGen g);
std::optional<CellGen> cell_gen_from_name(std::string_view s);
Modality cell_gen_source(CellGen g);
Modality cell_gen_target(CellGen g);

class ModeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a vertical composite does not typecheck.
class BoundaryError : public ModeError {
 public:
  BoundaryError(Modality expected, Modality actual);
  Modality expected;
  Modality actual;
};

struct TwoCell;
using TwoCellPtr = std::shared_ptr<const TwoCell>;

/// Expression tree of 2-cells.
struct TwoCell {
  enum class Kind { Id, Gen, WhiskerL, WhiskerR, VComp };
  Kind kind;
  Modality mod;       // Id: the object; WhiskerL/WhiskerR: the whiskering modality
  CellGen gen{};      // Gen
  TwoCellPtr first;   // WhiskerL/WhiskerR: the cell; VComp: applied first
  TwoCellPtr second;  // VComp: applied second

  static TwoCellPtr identity(Modality m);
  static TwoCellPtr generator(CellGen g);
  static TwoCellPtr whisker_left(Modality m, TwoCellPtr c);
  static TwoCellPtr whisker_right(TwoCellPtr c, Modality m);
  /// `second o first`
  static TwoCellPtr vcomp(TwoCellPtr second, TwoCellPtr first);
  /// Horizontal composite `outer * inner`, expressed with whiskers.
  static TwoCellPtr hcomp(const TwoCellPtr& outer, const TwoCellPtr& inner);
};

/// One whiskered generator `left * gen * right`; whiskers are normal.
struct Atom {
  Modality left;
  CellGen gen;
  Modality right;

  Modality source() const;
  Modality target() const;
  friend bool operator==(const Atom&, const Atom&) = default;
};
std::strong_ordering operator<=>(const Atom& a, const Atom& b);

/// Canonical form: atoms composed vertically, first atom applied first.
/// An empty atom list is the identity on `source`.
struct NormalCell {
  Modality source;
  Modality target;
  std::vector<Atom> atoms;

  static NormalCell identity(const Modality& m);
  bool is_identity() const { return atoms.empty(); }
  friend bool operator==(const NormalCell&, const NormalCell&) = default;
};
std::strong_ordering operator<=>(const NormalCell& a, const NormalCell& b);

/// (source, target), normalized. Throws BoundaryError on an ill-formed VComp.
std::pair<Modality, Modality> cell_boundary(const TwoCell& c);

NormalCell normalize_cell(const TwoCell& c);
/// Renormalizes an atom chain with the given boundary.
NormalCell normalize_atoms(const Modality& source, const Modality& target,
                           std::vector<Atom> atoms);

/// Decides equality of parallel cells; throws BoundaryError when the
/// boundaries differ.
bool eq_cell(const TwoCell& a, const TwoCell& b);
bool eq_cell(const NormalCell& a, const NormalCell& b);

// Operations directly on normal cells.
NormalCell vcomp(const NormalCell& second, const NormalCell& first);
NormalCell whisker_left(const Modality& m, const NormalCell& c);
NormalCell whisker_right(const NormalCell& c, const Modality& m);
TwoCellPtr to_two_cell(const NormalCell& c);

/// All cells `source -> target` that are vertical composites of at most
/// `depth` whiskered generators, distinct up to normal form, sorted.
std::vector<NormalCell> search_cells(const Modality& source, const Modality& target,
                                     int depth);

/// `[tw * eps * id] ; [id * pi1 * id]`, or `id(tw)` for an identity.
std::string to_chain_string(const NormalCell& c);
/// Re-parseable expression syntax, e.g. `pi1 * op . tau`.
std::string to_expr_string(const NormalCell& c);
std::string to_expr_string(const TwoCell& c);

/// Parses the cell expression syntax. Generator names: eps, zeta, tau,
/// tauinv, pi0, pi1; modality names act as identity cells; `*` whiskers or
/// composes horizontally; `.` composes vertically (`second . first`). A
/// name fusing a generator and a modality (`pi1op`, `tweps`) is a whisker.
TwoCellPtr parse_cell(std::string_view text);

}  // namespace stt
