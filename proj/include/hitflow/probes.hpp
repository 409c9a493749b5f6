#pragma once

#include <map>

#include "hitflow/flows.hpp"
#include "hitflow/hyp_plane.hpp"

// Verification layer: geometric crossing enumeration, the curve-pairing
// variation formula against finite differences, angle decay along twists,
// invariant-form and algebra-dimension probes, and the eigenvalue-relation
// monitor.
namespace hitflow::probes {

using grp::Representation;
using grp::Word;
using hyp::Geodesic;
using lie::InvariantFunctional;
using linalg::Mat;

// One transverse intersection of the closed curves carried by x and y: the
// conjugator g moves the axis of y onto the crossing translate; sign and
// angle follow the upper-half-plane conventions of hyp::cross. Matrices are
// re-evaluated per representation, so a crossing stays valid along flows.
struct Crossing {
    Word conjugator;
    Word x_word;
    Word y_word;  // g y g^{-1}
    int sign = +1;
    double angle = 0.0;
    double position = 0.0;  // location on the x-axis, mod the translation length
};

namespace detail {

struct DedupSet {
    std::map<std::array<long long, 4>, std::vector<Mat>> buckets;

    bool insert(const Mat& m) {
        Mat n = m;
        double scale = 1.0 / std::max(1e-300, n.frobenius());
        int lead = 0;
        for (int i = 1; i < 4; ++i)
            if (std::abs(n.a[i]) > std::abs(n.a[lead])) lead = i;
        if (n.a[lead] < 0) scale = -scale;
        n *= scale;
        std::array<long long, 4> key{};
        for (int i = 0; i < 4; ++i) key[i] = llround(n.a[i] * 1e7);
        auto& bucket = buckets[key];
        for (const Mat& seen : bucket)
            if ((seen - n).max_abs() < 1e-6) return false;
        bucket.push_back(n);
        return true;
    }
};

inline double displacement(const Mat& g) {
    const std::complex<double> z = hyp::mobius_apply(g, std::complex<double>(0, 1));
    const double num = std::norm(z - std::complex<double>(0, 1));
    return std::acosh(1.0 + num / (2.0 * z.imag()));
}

inline double distance_to_axis(const Geodesic& g, std::complex<double> z) {
    // distance from z to the geodesic, via the standard cross-ratio formula
    if (g.a.is_infinite() || g.b.is_infinite()) {
        const double x0 = g.a.is_infinite() ? g.b.value() : g.a.value();
        return std::asinh(std::abs(z.real() - x0) / z.imag());
    }
    const double c = 0.5 * (g.a.value() + g.b.value());
    const double r = 0.5 * std::abs(g.b.value() - g.a.value());
    const double d = std::abs(z - std::complex<double>(c, 0.0));
    return std::acosh(std::max(1.0, (d * d + r * r) / (2.0 * r * z.imag())));
}

}  // namespace detail

// All crossings of the closed geodesics carried by x and y, enumerated over
// group elements of word length up to the bound; the count must agree at L
// and L+2 or the enumeration reports itself unstable.
inline std::vector<Crossing> enumerate_crossings(const Representation& rep2, const Word& x,
                                                 const Word& y, int word_bound = 10) {
    const hyp::MobiusElement mx{grp::eval_word(rep2, x).m};
    const hyp::MobiusElement my{grp::eval_word(rep2, y).m};
    if (mx.classify() != hyp::MobiusClass::Hyperbolic ||
        my.classify() != hyp::MobiusClass::Hyperbolic)
        throw NotHyperbolic("enumerate_crossings: both curves must be hyperbolic");
    const Geodesic axis_x = hyp::axis(mx);
    const Geodesic axis_y = hyp::axis(my);
    {
        const auto& xa = axis_x.a;
        const auto& xb = axis_x.b;
        if (std::abs(hyp::pair_det(xa, axis_y.a)) < 1e-9 &&
            std::abs(hyp::pair_det(xb, axis_y.b)) < 1e-9)
            throw SharedAxis("enumerate_crossings: the two curves share an axis");
        if (std::abs(hyp::pair_det(xa, axis_y.b)) < 1e-9 &&
            std::abs(hyp::pair_det(xb, axis_y.a)) < 1e-9)
            throw SharedAxis("enumerate_crossings: the two curves share an axis");
    }
    const double len_x = mx.translation_length();
    const double len_y = my.translation_length();
    const std::complex<double> base(0, 1);
    const double keep_radius = detail::distance_to_axis(axis_x, base) +
                               detail::distance_to_axis(axis_y, base) + len_x + len_y + 1.5;
    const double expand_radius = keep_radius + 3.5;

    struct Node {
        Word w;
        Mat m;
    };
    const int gens = rep2.presentation.generators;
    std::vector<Mat> letter(2 * gens, Mat(2, 2));
    for (int g = 0; g < gens; ++g) {
        letter[g] = rep2.images[g].m;
        letter[gens + g] = linalg::inverse(rep2.images[g].m);
    }

    auto collect = [&](int bound) {
        std::vector<std::tuple<double, int, double, Word>> found;  // (pos, sign, angle, g)
        detail::DedupSet seen;
        std::vector<Node> frontier{{Word::one(), Mat::identity(2)}};
        seen.insert(frontier.front().m);
        auto consider = [&](const Node& node) {
            Geodesic moved{hyp::mobius_apply(node.m, axis_y.a),
                           hyp::mobius_apply(node.m, axis_y.b)};
            std::optional<hyp::CrossingGeom> cg;
            try {
                cg = hyp::cross(axis_x, moved);
            } catch (const SharedEndpoint&) {
                return;
            }
            if (!cg) return;
            const double pos_raw = hyp::axis_position(axis_x, cg->point);
            double pos = std::fmod(pos_raw, len_x);
            if (pos < 0) pos += len_x;
            for (const auto& [p0, s0, a0, w0] : found) {
                const double dp = std::min(std::abs(p0 - pos), len_x - std::abs(p0 - pos));
                if (dp < 1e-6 && s0 == cg->sign && std::abs(a0 - cg->angle) < 1e-6) return;
            }
            found.emplace_back(pos, cg->sign, cg->angle, node.w);
        };
        consider(frontier.front());
        for (int depth = 0; depth < bound; ++depth) {
            std::vector<Node> next;
            for (const Node& node : frontier) {
                for (int l = 0; l < 2 * gens; ++l) {
                    const int g = l % gens, e = l < gens ? +1 : -1;
                    if (!node.w.empty() && node.w.letters.back().gen == g &&
                        node.w.letters.back().exp == -e)
                        continue;
                    Node child{node.w * Word::gen(g, e), node.m * letter[l]};
                    if (detail::displacement(child.m) > expand_radius) continue;
                    if (!seen.insert(child.m)) continue;
                    consider(child);
                    next.push_back(std::move(child));
                }
            }
            frontier.swap(next);
        }
        return found;
    };

    auto at_bound = collect(word_bound);
    auto at_bound_2 = collect(word_bound + 2);
    if (at_bound.size() != at_bound_2.size())
        throw Unstable("enumerate_crossings: crossing count did not stabilize; raise the bound");

    std::vector<Crossing> out;
    for (const auto& [pos, sign, angle, g] : at_bound) {
        Crossing c;
        c.conjugator = g;
        c.x_word = x;
        c.y_word = y.conjugated_by(g);
        c.sign = sign;
        c.angle = angle;
        c.position = pos;
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const Crossing& a, const Crossing& b) { return a.position < b.position; });
    return out;
}

// Refresh sign/angle/position of topologically fixed crossings at a deformed
// (still Fuchsian) representation.
inline std::vector<Crossing> recompute_geometry(const std::vector<Crossing>& crossings,
                                                const Representation& rep2) {
    std::vector<Crossing> out;
    for (const Crossing& c : crossings) {
        const Geodesic gx = hyp::word_axis(rep2, c.x_word);
        const Geodesic gy = hyp::word_axis(rep2, c.y_word);
        auto cg = hyp::cross(gx, gy);
        if (!cg)
            throw Unstable("recompute_geometry: crossing disappeared along the deformation");
        Crossing updated = c;
        updated.sign = cg->sign;
        updated.angle = cg->angle;
        const double len = hyp::MobiusElement{grp::eval_word(rep2, c.x_word).m}
                               .translation_length();
        double pos = std::fmod(hyp::axis_position(gx, cg->point), len);
        if (pos < 0) pos += len;
        updated.position = pos;
        out.push_back(std::move(updated));
    }
    return out;
}

// Crossing sign convention: the flow engine moves the far side by exp(-t F),
// and with the upper-half-plane orientation this pairs with crossings counted
// clockwise. Pinned once against the twist-cosine check and used everywhere.
inline int flow_sign(const Crossing& c) { return -c.sign; }

// Sum of sign_p Tr(\hat f(rho(x_p)) \hat g(rho(y_p))) over the crossings,
// evaluated in the given (arbitrary-dimension) representation.
inline double product_formula_rhs(const std::vector<Crossing>& crossings,
                                  const InvariantFunctional& f, const InvariantFunctional& g,
                                  const Representation& rep) {
    double sum = 0;
    for (const Crossing& c : crossings) {
        const Mat fx = lie::goldman_hat(grp::eval_word(rep, c.x_word), f).entries;
        const Mat gy = lie::goldman_hat(grp::eval_word(rep, c.y_word), g).entries;
        sum += flow_sign(c) * (fx * gy).trace();
    }
    return sum;
}

// Twist-cosine closed form: sum of 2 cos of the line angle (angle folded by
// the crossing sign) over the crossings of a Fuchsian point.
inline double twist_cosine_sum(const std::vector<Crossing>& crossings) {
    double sum = 0;
    for (const Crossing& c : crossings) sum += 2.0 * flow_sign(c) * std::cos(c.angle);
    return sum;
}

// Bulge closed form up to one global normalization: sum of sign_p
// (1 + 3 cos 2 phi_p); cos 2 phi is insensitive to the angle convention.
inline double bulge_angle_sum(const std::vector<Crossing>& crossings) {
    double sum = 0;
    for (const Crossing& c : crossings) sum += flow_sign(c) * (1.0 + 3.0 * std::cos(2.0 * c.angle));
    return sum;
}

// --- finite differences -----------------------------------------------------------

struct FdResult {
    double central = 0.0;
    double richardson = 0.0;
};

// Central difference of f(lambda(rho_t(x))) along a Goldman flow, with the
// Richardson-extrapolated value from steps h and h/2.
inline FdResult fd_derivative(const Representation& rep, flows::FlowSpec spec, const Word& x,
                              const InvariantFunctional& f, double h = 1e-4) {
    if (!(h > 0)) throw ConfigInvalid("fd_derivative: step must be positive");
    auto value_at = [&](double t) {
        spec.time = t;
        const Representation moved = flows::goldman_flow(rep, spec);
        return f.apply(grp::jordan_of_word(moved, x));
    };
    FdResult r;
    const double d_h = (value_at(h) - value_at(-h)) / (2.0 * h);
    const double d_h2 = (value_at(h / 2) - value_at(-h / 2)) / h;
    r.central = d_h;
    r.richardson = (4.0 * d_h2 - d_h) / 3.0;
    return r;
}

// --- angle decay under twisting -----------------------------------------------------

struct AngleDecay {
    std::vector<double> max_angles;  // per requested time
    bool strictly_decreasing = true;
};

// Largest crossing angle (line-angle convention) along the twist path. The
// crossings are topological data fixed at the base point; the angles are
// recomputed from the deformed axes at each time.
inline AngleDecay angle_decay(const Representation& rep2, const Word& x, const Word& y,
                              const std::vector<double>& times, int word_bound = 10) {
    auto crossings = enumerate_crossings(rep2, x, y, word_bound);
    if (crossings.empty()) throw Unstable("angle_decay: the two curves do not cross");
    auto splitting_for = [&](const Representation&) {
        grp::Splitting s;
        s.kind = grp::SplittingKind::Hnn;
        s.curve = y;
        return s;
    };
    AngleDecay result;
    for (double t : times) {
        // twist directly: conjugating nothing but the stable side is not
        // expressible for arbitrary y, so deform every generator image that a
        // graph-of-groups flow would move; for the built-in curves this is
        // the engine itself
        Representation moved = rep2;
        if (t != 0.0) {
            grp::Splitting split;
            bool found_builtin = false;
            for (const char* id : {"a1", "a2", "sep"}) {
                try {
                    split = grp::standard_splitting(rep2.presentation, id);
                } catch (const UnsupportedCurve&) {
                    continue;
                }
                if (split.curve == y) {
                    found_builtin = true;
                    break;
                }
            }
            if (!found_builtin)
                throw UnsupportedCurve("angle_decay: twisting needs a built-in curve");
            moved = flows::goldman_flow(
                rep2, flows::FlowSpec{split, lie::ell_functional(rep2.dim()), t});
        }
        double max_angle = 0.0;
        for (const Crossing& c : recompute_geometry(crossings, moved)) {
            const double line_angle = c.sign > 0 ? c.angle : M_PI - c.angle;
            max_angle = std::max(max_angle, line_angle);
        }
        result.max_angles.push_back(max_angle);
        (void)splitting_for;
    }
    for (size_t i = 0; i + 1 < result.max_angles.size(); ++i)
        if (!(result.max_angles[i + 1] < result.max_angles[i] + 1e-9))
            result.strictly_decreasing = false;
    return result;
}

// --- algebraic density probes --------------------------------------------------------

struct BilinearVerdict {
    int sym_dim = 0;
    int antisym_dim = 0;
    Mat sym_witness;      // unit Frobenius norm when sym_dim > 0
    Mat antisym_witness;  // unit Frobenius norm when antisym_dim > 0
};

// Solve g^T Q g = Q for all given g, split into symmetric and antisymmetric
// parts; returns solution-space dimensions and unit-norm witnesses.
inline BilinearVerdict invariant_bilinear(const std::vector<Mat>& mats, double tol = 1e-10) {
    if (mats.empty()) throw ConfigInvalid("invariant_bilinear: need at least one matrix");
    const int n = mats.front().rows;
    auto solve_part = [&](bool symmetric, int& dim, Mat& witness) {
        std::vector<Mat> basis;
        for (int i = 0; i < n; ++i)
            for (int j = symmetric ? i : i + 1; j < n; ++j) {
                Mat q(n, n);
                q(i, j) = 1.0;
                if (symmetric)
                    q(j, i) = 1.0;
                else
                    q(j, i) = -1.0;
                basis.push_back(std::move(q));
            }
        const int k = static_cast<int>(basis.size());
        Mat system(static_cast<int>(mats.size()) * n * n, k);
        for (int b = 0; b < k; ++b) {
            int row = 0;
            for (const Mat& g : mats) {
                const Mat defect = g.transpose() * basis[b] * g - basis[b];
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) system(row++, b) = defect(i, j);
            }
        }
        const Mat ns = linalg::nullspace(system, tol);
        dim = ns.cols;
        if (dim > 0) {
            Mat q(n, n);
            for (int b = 0; b < k; ++b) q += basis[b] * ns(b, 0);
            q *= 1.0 / q.frobenius();
            witness = std::move(q);
        }
    };
    BilinearVerdict v;
    solve_part(true, v.sym_dim, v.sym_witness);
    solve_part(false, v.antisym_dim, v.antisym_witness);
    return v;
}

// Dimension of the associative algebra spanned by words in the matrices
// (with the identity), via Gram-Schmidt at SVD-grade tolerance.
inline int burnside_dim(const std::vector<Mat>& mats, double tol = 1e-10) {
    if (mats.empty()) throw ConfigInvalid("burnside_dim: need at least one matrix");
    const int n = mats.front().rows;
    std::vector<Mat> ortho;      // orthonormal flattened basis
    std::vector<Mat> frontier;   // raw matrices whose products still need exploring
    auto try_add = [&](const Mat& cand) {
        Mat r = cand;
        for (const Mat& b : ortho) r -= b * linalg::dot(b, r);
        // re-orthogonalize once for numerical safety
        for (const Mat& b : ortho) r -= b * linalg::dot(b, r);
        if (r.frobenius() <= tol * std::max(1.0, cand.frobenius())) return false;
        r *= 1.0 / r.frobenius();
        ortho.push_back(std::move(r));
        frontier.push_back(cand);
        return true;
    };
    try_add(Mat::identity(n));
    for (const Mat& m : mats) try_add(m);
    size_t head = 0;
    while (head < frontier.size() && static_cast<int>(ortho.size()) < n * n) {
        const Mat current = frontier[head++];
        for (const Mat& g : mats) {
            Mat prod = current * g;
            prod *= 1.0 / std::max(1e-300, prod.frobenius());
            try_add(prod);
        }
    }
    return static_cast<int>(ortho.size());
}

enum class SymFormKind { None, Symmetric, Antisymmetric };

struct DensityVerdict {
    int burnside = 0;
    SymFormKind sym_form = SymFormKind::None;
    Mat witness;
    bool candidate_dense = false;
    bool degenerate = false;  // flagged when the form space is not cut down at all
};

// Necessary-condition probe: full matrix algebra and no invariant bilinear
// form. A candidate verdict is never a density proof.
inline DensityVerdict density_probe(const std::vector<Mat>& mats) {
    DensityVerdict v;
    v.burnside = burnside_dim(mats);
    const int n = mats.front().rows;
    BilinearVerdict bl = invariant_bilinear(mats);
    if (bl.sym_dim > 0) {
        v.sym_form = SymFormKind::Symmetric;
        v.witness = bl.sym_witness;
    } else if (bl.antisym_dim > 0) {
        v.sym_form = SymFormKind::Antisymmetric;
        v.witness = bl.antisym_witness;
    }
    v.degenerate = bl.sym_dim + bl.antisym_dim == n * (n + 1) / 2 + n * (n - 1) / 2;
    v.candidate_dense =
        v.burnside == n * n && bl.sym_dim == 0 && bl.antisym_dim == 0 && !v.degenerate;
    return v;
}

// --- eigenvalue-relation monitor ------------------------------------------------------

// max over the words of |lambda_i + lambda_{n-i+1}| — identically zero on the
// locus of embedded PSL2 representations and broken by generic deformations.
inline double relation_monitor(const Representation& rep, const std::vector<Word>& words, int i) {
    const int n = rep.dim();
    if (i < 1 || i > n) throw IndexOutOfRange("relation_monitor: index out of range");
    double worst = 0;
    for (const Word& w : words) {
        const auto lam = grp::jordan_of_word(rep, w);
        worst = std::max(worst, std::abs(lam[i - 1] + lam[n - i]));
    }
    return worst;
}

// cyclically reduced representatives of conjugacy-and-inversion classes of
// nontrivial words up to a length bound
inline std::vector<Word> cyclic_word_classes(int gens, int max_len) {
    std::vector<Word> out;
    std::vector<int> letters;
    auto canonical = [&](const std::vector<int>& w) {
        auto rotations_min = [&](std::vector<int> v) {
            std::vector<int> best = v;
            for (size_t r = 1; r < v.size(); ++r) {
                std::rotate(v.begin(), v.begin() + 1, v.end());
                if (v < best) best = v;
            }
            return best;
        };
        std::vector<int> inv(w.size());
        for (size_t i = 0; i < w.size(); ++i) {
            const int l = w[w.size() - 1 - i];
            inv[i] = l < gens ? l + gens : l - gens;
        }
        return std::min(rotations_min(w), rotations_min(inv));
    };
    std::vector<std::vector<int>> seen_sorted;
    std::function<void(int)> dfs = [&](int remaining) {
        if (!letters.empty()) {
            const bool reduced_cyc =
                letters.size() < 2 ||
                !(letters.front() % gens == letters.back() % gens &&
                  (letters.front() < gens) != (letters.back() < gens));
            if (reduced_cyc) {
                auto canon = canonical(letters);
                auto it = std::lower_bound(seen_sorted.begin(), seen_sorted.end(), canon);
                if (it == seen_sorted.end() || *it != canon) {
                    seen_sorted.insert(it, canon);
                    Word w;
                    for (int l : letters) w.push({l % gens, l < gens ? +1 : -1});
                    out.push_back(std::move(w));
                }
            }
        }
        if (remaining == 0) return;
        for (int l = 0; l < 2 * gens; ++l) {
            if (!letters.empty()) {
                const int p = letters.back();
                if (p % gens == l % gens && (p < gens) != (l < gens)) continue;
            }
            letters.push_back(l);
            dfs(remaining - 1);
            letters.pop_back();
        }
    };
    dfs(max_len);
    return out;
}

}  // namespace hitflow::probes
