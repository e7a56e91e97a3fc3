#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace tabaug {

enum class ConstraintKind { unconstrained, isomorphic, mirror, self_symmetric, relative_isomorphic };

const char* to_string(ConstraintKind k);
ConstraintKind constraint_from_string(const std::string& s);

/// delta is meaningful only for relative_isomorphic and must come from
/// kRelativeDeltas.
struct Constraint {
    ConstraintKind kind = ConstraintKind::unconstrained;
    double delta = 0.0;
};

/// The six relative-isomorphic variants, in their published order.
inline constexpr std::array<double, 6> kRelativeDeltas = {+0.10, -0.10, +0.20, -0.20, +0.30, -0.30};

bool is_permitted_delta(double delta);

/// Full layer-width description of a generator-critic pair. Both width lists
/// include input and output layers; hidden constraints never touch the output
/// widths (data_dim for G, 1 for D).
struct ArchSpec {
    std::size_t data_dim = 0;
    std::size_t noise_dim = 0;
    std::vector<std::size_t> g_widths; // noise_dim, hidden..., data_dim
    std::vector<std::size_t> d_widths; // data_dim, hidden..., 1
    Constraint constraint;

    std::vector<std::size_t> g_hidden() const {
        return {g_widths.begin() + 1, g_widths.end() - 1};
    }
    std::vector<std::size_t> d_hidden() const {
        return {d_widths.begin() + 1, d_widths.end() - 1};
    }
};

/// G and D share the hidden trunk; noise_dim = data_dim so the input layers
/// match too. Only the output widths differ.
ArchSpec build_isomorphic(std::size_t data_dim, const std::vector<std::size_t>& hidden);

/// D's hidden trunk is G's reversed.
ArchSpec build_mirror(std::size_t data_dim, const std::vector<std::size_t>& g_hidden);

/// Both nets get the odd-length palindrome half ++ reverse(drop_last(half)),
/// e.g. [64,32] -> [64,32,64].
ArchSpec build_self_symmetric(std::size_t data_dim, const std::vector<std::size_t>& half);

/// Same layer count; D's hidden widths are G's scaled by (1+delta), rounded
/// half away from zero and floored at 1.
ArchSpec build_relative_isomorphic(std::size_t data_dim, const std::vector<std::size_t>& hidden,
                                   double delta);

/// No structural tie between the trunks.
ArchSpec build_unconstrained(std::size_t data_dim, const std::vector<std::size_t>& g_hidden,
                             const std::vector<std::size_t>& d_hidden);

/// Width scaling rule shared with build_relative_isomorphic.
std::size_t scaled_width(std::size_t width, double delta);

/// Empty list means the spec satisfies every structural invariant of its
/// constraint kind; otherwise one message per violation.
std::vector<std::string> validate(const ArchSpec& spec);

std::string to_json(const ArchSpec& spec);
ArchSpec arch_from_json(const std::string& text);

} // namespace tabaug
