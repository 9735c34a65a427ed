#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vndim/matrix.hpp"
#include "vndim/space.hpp"
#include "vndim/turing.hpp"

namespace vndim {

/// A measurable edge: a group word restricted to a cylinder. The domain is
/// given in point coordinates (offset 0 = the head), so the same edge tests
/// uniformly against any configuration. The word must be fully determined on
/// the domain.
struct Edge {
  Word word;
  Cylinder domain;
  std::string label;
};

/// Inverse partial bijection: reversed inverted word on the image cylinder.
Edge inverse_edge(const SpaceDescriptor& sp, const Edge& e, Coord window = kDefaultWindow);

/// Operator product edge: apply `a`, then `b`; the domain is pulled back so
/// the composite is defined exactly where both factors apply. nullopt when
/// the domains miss each other.
std::optional<Edge> compose_edges(const SpaceDescriptor& sp, const Edge& a, const Edge& b,
                                  Coord window = kDefaultWindow);

/// Identity-word edge on a cylinder (a multiplication operator's support).
Edge indicator_edge(const SpaceDescriptor& sp, Cylinder domain, std::string label);

struct OperatorTerm {
  Rational coeff;
  Edge edge;
};

/// Rational combination of (coefficient, edge) terms; indicator functions
/// are absorbed into edge domains.
struct OperatorExpression {
  std::vector<OperatorTerm> terms;
  /// Row-sum bound sum |coeff|, used for moment tail estimates.
  Rational norm_bound() const;
};

/// Conjugates coefficients and inverts edges; an involution.
OperatorExpression adjoint(const SpaceDescriptor& sp, const OperatorExpression& expr);

enum class VertexTag : std::uint8_t { None, Initial, Accepting, Rejecting };

struct SchreierDiagram {
  struct Arc {
    std::uint32_t from;
    std::uint32_t to;
    std::uint16_t edge;
  };
  std::vector<SymbolicConfig> vertices;
  std::vector<VertexTag> tags;
  std::vector<Arc> arcs;
  std::uint32_t root = 0;

  std::size_t size() const { return vertices.size(); }
  std::size_t count_tag(VertexTag t) const;
  /// Canonical encoding of the labeled diagram, minimized over all start
  /// vertices, used for class aggregation.
  std::string canonical_form() const;
};

struct TooLarge {
  std::size_t limit;
  std::string reason;
};

/// The closure needs a cell (or factor) of the seed split before every edge
/// applicability test is decidable. Coordinates refer to the seed.
struct UndecidedCell {
  bool on_factor = false;
  int factor = 0;
  int tape = 0;
  Coord coord = 0;
  std::vector<SymbolSet> parts;
};

using DiagramResult = std::variant<SchreierDiagram, TooLarge, UndecidedCell>;

using TagFn = std::function<VertexTag(const SymbolicConfig&)>;

/// Closure of the seed under the edges and their inverses. Vertices are
/// orbit points: two paths land on the same vertex only when their composite
/// words act identically on every point of the seed cylinder, so the vertex
/// count equals the orbit size for almost every point of the class.
/// Throws stabilizer_detected when a nonempty reduced edge word fixes a
/// vertex through a non-identity group action.
DiagramResult orbit_diagram(const SpaceDescriptor& sp, const SymbolicConfig& seed,
                            const std::vector<Edge>& edges, std::size_t cap,
                            Coord window = kDefaultWindow, const TagFn& tag = {});

struct OrbitClass {
  Cylinder cylinder;  // representative piece, point view
  SchreierDiagram diagram;
  Rational mass;  // aggregate over label-isomorphic pieces
  std::size_t pieces = 0;
};

struct ClassEnumeration {
  std::vector<OrbitClass> classes;
  Rational residual_mass;
  Rational enumerated_mass;
  std::size_t piece_count = 0;
  /// Per-piece diagrams, kept only on request (piece cylinder, diagram, mass).
  std::vector<OrbitClass> pieces;
};

struct EnumerateOptions {
  Coord window = kDefaultWindow;
  std::size_t cap = 10000;
  bool keep_pieces = false;
};

/// Partitions the space into cylinder classes with constant diagram type.
/// Classes are pairwise disjoint and enumerated mass + residual = 1 exactly;
/// candidates that exceed the window or the vertex cap fall into residual.
ClassEnumeration enumerate_orbit_classes(const SpaceDescriptor& sp, const std::vector<Edge>& edges,
                                         const EnumerateOptions& opt, const TagFn& tag = {});

/// Square matrix over the diagram's vertices: entry (u -> v) sums the
/// coefficients of terms whose edge maps u to v; multiplication operators
/// land on the diagonal. Throws undecided_vertex if a vertex cylinder is too
/// coarse to decide a term.
RationalMatrix convolution_matrix(const SpaceDescriptor& sp, const SchreierDiagram& d,
                                  const OperatorExpression& expr, Coord window = kDefaultWindow);

/// One edge per block row of the system (the generating sequence of its
/// groupoid), including the identity edges of accepting/rejecting blocks.
std::vector<Edge> system_edges(const TuringSystem& sys);

TagFn system_tag(const TuringSystem& sys);

std::string diagram_dot(const SpaceDescriptor& sp, const SchreierDiagram& d,
                        const std::vector<Edge>& edges);

}  // namespace vndim
