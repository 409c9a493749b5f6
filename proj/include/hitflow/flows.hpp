#pragma once

#include "hitflow/groups.hpp"

// Deformation flows on representations: twist/bulge flows realized through a
// graph-of-groups splitting, their lifts to finite abelian covers along the
// preimage multicurve, and conjugation-invariant comparison of the two.
namespace hitflow::flows {

using grp::CoverData;
using grp::Representation;
using grp::Splitting;
using grp::Word;
using lie::InvariantFunctional;
using lie::SquareMatrix;
using linalg::Mat;

struct FlowSpec {
    Splitting splitting;
    InvariantFunctional functional;
    double time = 0.0;
};

namespace detail {

inline int single_positive_letter(const Word& w, const char* what) {
    if (w.length() != 1 || w.letters[0].exp != +1)
        throw UnsupportedCurve(std::string(what) + ": expected a single positive generator");
    return w.letters[0].gen;
}

}  // namespace detail

// One flow step. The conjugating direction is fixed so that the far side of
// the splitting moves by exp(-t F) for positive t, F the Goldman function of
// the curve image; the stable letter of an HNN splitting picks up exp(-t F)
// on the right. The curve image itself is preserved exactly in both cases
// since F commutes with it.
inline Representation goldman_flow(const Representation& rep, const FlowSpec& spec) {
    if (rep.relator_residual() > 1e-8)
        throw RelatorBroken("goldman_flow: input relator residual too large");
    const SquareMatrix curve_img = grp::eval_word(rep, spec.splitting.curve);
    const Mat f_hat = lie::goldman_hat(curve_img, spec.functional).entries;
    const Mat flow_neg = linalg::expm(f_hat * -spec.time);
    const Mat flow_pos = linalg::expm(f_hat * spec.time);
    Representation out = rep;
    if (spec.splitting.kind == grp::SplittingKind::Hnn) {
        const int stable = detail::single_positive_letter(spec.splitting.stable_letter,
                                                          "goldman_flow stable letter");
        out.images[stable] =
            SquareMatrix::unimodular(linalg::mul_extended(rep.images[stable].m, flow_neg));
    } else {
        for (const Word& v : spec.splitting.vertex_generators.at(1)) {
            const int g = detail::single_positive_letter(v, "goldman_flow vertex generator");
            out.images[g] = SquareMatrix::unimodular(
                linalg::mul_extended(flow_neg, rep.images[g].m, flow_pos));
        }
    }
    if (out.relator_residual() > 1e-8)
        throw RelatorBroken("goldman_flow: output relator residual too large");
    return out;
}

// --- lifted flows on finite abelian covers ---------------------------------------

// Splitting bookkeeping for the preimage multicurve of an HNN curve in a
// finite abelian cover whose quotient graph has a single vertex. Every raw
// Schreier lift of the stable letter factors as (vertex element) * (chosen
// stable lift of its edge orbit), so the flow multiplies it by exp(-t F_j) on
// the right, F_j the Goldman function of the j-th curve component.
struct CoverFlowData {
    CoverData cover;
    Splitting downstairs;
    grp::LiftedCurve lifted;
    int stable_gen = 0;                  // downstairs stable letter (ambient index)
    std::vector<int> component_of_coset; // edge orbit per coset

    // first coset of an edge orbit, matching lift_curve's component order
    int orbit_rep_coset(int j) const {
        for (size_t c = 0; c < component_of_coset.size(); ++c)
            if (component_of_coset[c] == j) return static_cast<int>(c);
        throw IndexOutOfRange("orbit_rep_coset: no such component");
    }
};

inline CoverFlowData build_cover_flow(const CoverData& cover, const Splitting& downstairs) {
    if (downstairs.kind != grp::SplittingKind::Hnn)
        throw UnsupportedCurve("build_cover_flow: cover flows need an HNN splitting downstairs");
    CoverFlowData cf;
    cf.cover = cover;
    cf.downstairs = downstairs;
    cf.stable_gen =
        detail::single_positive_letter(downstairs.stable_letter, "build_cover_flow stable letter");
    // the quotient graph must have one vertex: the vertex-group letters must
    // already reach every coset
    {
        grp::AbelianHom sub = cover.hom;
        std::vector<std::vector<int>> reach{sub.zero()};
        for (size_t head = 0; head < reach.size(); ++head)
            for (const Word& v : downstairs.vertex_generators.at(0)) {
                const int g = detail::single_positive_letter(v, "build_cover_flow vertex gen");
                for (int e : {+1, -1}) {
                    auto nxt = sub.add(reach[head],
                                       e > 0 ? sub.images[g] : sub.neg(sub.images[g]));
                    if (std::find(reach.begin(), reach.end(), nxt) == reach.end())
                        reach.push_back(nxt);
                }
            }
        if (static_cast<int>(reach.size()) != cover.index)
            throw UnsupportedCurve("build_cover_flow: quotient graph has more than one vertex");
    }
    cf.lifted = grp::lift_curve(cover, downstairs.curve);
    // edge orbits: cosets modulo the image of the curve, in the same order
    // lift_curve walked them
    const auto phi = cover.hom.apply(downstairs.curve);
    cf.component_of_coset.assign(cover.index, -1);
    int next_component = 0;
    for (int c = 0; c < cover.index; ++c) {
        if (cf.component_of_coset[c] >= 0) continue;
        auto label = cover.cosets[c];
        for (int k = 0; k < cf.lifted.m; ++k) {
            cf.component_of_coset[cover.coset_of(label)] = next_component;
            label = cover.hom.add(label, phi);
        }
        ++next_component;
    }
    // structural check: within an edge orbit the transversal differs from the
    // representative by a power of the curve, so each raw stable lift factors
    // through the orbit's chosen lift
    const auto phi_t = cover.hom.images[cf.stable_gen];
    for (int c = 0; c < cover.index; ++c) {
        const int j = cf.component_of_coset[c];
        const int cj = cf.orbit_rep_coset(j);
        const int c_after = cover.coset_of(cover.hom.add(cover.cosets[c], phi_t));
        const int cj_after = cover.coset_of(cover.hom.add(cover.cosets[cj], phi_t));
        const Word v = cover.transversal[c_after].inverse() * cover.transversal[cj_after];
        bool ok = false;
        for (int k = -cover.index; k <= cover.index; ++k)
            if (v == downstairs.curve.power(k)) ok = true;
        if (!ok)
            throw UnsupportedCurve(
                "build_cover_flow: transversal not adapted to the curve orbit");
    }
    return cf;
}

// Apply the composed Goldman flow along every component of the lifted curve
// to the cover representation (images indexed by the raw Schreier
// generators). Components act on disjoint generators, so the composition is
// order-independent by construction.
inline Representation lifted_flow_apply(const Representation& cover_rep, const CoverFlowData& cf,
                                        const InvariantFunctional& functional, double t) {
    std::vector<Mat> flow_neg;
    for (const Word& comp : cf.lifted.components) {
        const SquareMatrix img = grp::eval_word(cover_rep, comp);
        const Mat f_hat = lie::goldman_hat(img, functional).entries;
        flow_neg.push_back(linalg::expm(f_hat * -t));
    }
    Representation out = cover_rep;
    for (size_t i = 0; i < cf.cover.schreier_index.size(); ++i) {
        const auto [coset, gen] = cf.cover.schreier_index[i];
        if (gen != cf.stable_gen) continue;
        const int j = cf.component_of_coset[coset];
        out.images[i] =
            SquareMatrix::unimodular(linalg::mul_extended(cover_rep.images[i].m, flow_neg[j]));
    }
    return out;
}

// Conjugation-invariant comparison of (a) restricting the downstairs flow to
// the cover subgroup against (b) flowing the restricted representation along
// the lifted multicurve. Probe words are ambient words lying in the subgroup;
// the comparison uses traces and Jordan projections since the statement lives
// in conjugacy classes.
inline double flow_lift_compare(const Representation& rep, const Splitting& downstairs,
                                const InvariantFunctional& functional, double t,
                                const CoverData& cover, const std::vector<Word>& probe_words) {
    CoverFlowData cf = build_cover_flow(cover, downstairs);
    const Representation flowed_down = goldman_flow(rep, FlowSpec{downstairs, functional, t});
    const Representation cover_rep = grp::restrict_to_cover(rep, cover);
    const Representation flowed_cover = lifted_flow_apply(cover_rep, cf, functional, t);
    double dev = 0.0;
    for (const Word& w : probe_words) {
        if (cover.hom.apply(w) != cover.hom.zero())
            throw WordNotInSubgroup("flow_lift_compare: probe word not in the cover subgroup");
        const Word w_sub = cover.rewrite(w);
        const Mat lhs = grp::eval_word_extended(flowed_down, w);
        const Mat rhs = grp::eval_word_extended(flowed_cover, w_sub);
        const double tr_dev = std::min(std::abs(lhs.trace() - rhs.trace()),
                                       std::abs(lhs.trace() + rhs.trace()));
        dev = std::max(dev, tr_dev / std::max(1.0, std::abs(lhs.trace())));
        try {
            const auto lam_l = grp::jordan_of_word(flowed_down, w);
            const auto lam_r = grp::jordan_of_word(flowed_cover, w_sub);
            dev = std::max(dev, lie::max_abs_diff(lam_l, lam_r));
        } catch (const NotLoxodromic&) {
            // trace comparison already covers words outside the loxodromic set
        }
    }
    return dev;
}

}  // namespace hitflow::flows
