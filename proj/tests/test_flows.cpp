#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hitflow/flows.hpp"
#include "hitflow/hyp_plane.hpp"

using namespace hitflow;
using flows::FlowSpec;
using grp::AbelianHom;
using grp::Presentation;
using grp::Word;
using linalg::Mat;

namespace {

grp::Representation base3() {
    static grp::Representation rep = grp::embed(hyp::octagon_rep(), 3);
    return rep;
}

Word random_subgroup_word(std::mt19937_64& rng, const grp::CoverData& cover,
                          const grp::Representation& rep, int max_len) {
    while (true) {
        Word w;
        const int len = 2 + static_cast<int>(rng() % (max_len - 1));
        for (int i = 0; i < len; ++i)
            w.push({static_cast<int>(rng() % 4), (rng() & 1) ? +1 : -1});
        if (w.empty() || cover.hom.apply(w) != cover.hom.zero()) continue;
        // keep the evaluation scale bounded so absolute character deviations
        // stay meaningful in double precision
        if (grp::eval_word(rep, w).m.frobenius() < 1e4) return w;
    }
}

}  // namespace

TEST_CASE("flow at time zero is the identity", "[flows]") {
    auto rep = base3();
    auto pres = rep.presentation;
    for (const char* id : {"a1", "a2", "sep"}) {
        FlowSpec spec{grp::standard_splitting(pres, id), lie::ell_functional(3), 0.0};
        auto out = flows::goldman_flow(rep, spec);
        for (int g = 0; g < 4; ++g)
            REQUIRE((out.images[g].m - rep.images[g].m).max_abs() < 1e-12);
    }
}

TEST_CASE("separating flow fixes both vertex characters", "[flows]") {
    auto rep = base3();
    FlowSpec spec{grp::standard_splitting(rep.presentation, "sep"), lie::lambda_k_functional(3, 2),
                  0.8};
    auto out = flows::goldman_flow(rep, spec);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Word w;
        const bool near_side = trial % 2 == 0;
        const int len = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < len; ++i)
            w.push({static_cast<int>(rng() % 2) + (near_side ? 0 : 2), (rng() & 1) ? +1 : -1});
        if (w.empty()) continue;
        const double t0 = grp::eval_word(rep, w).m.trace();
        const double t1 = grp::eval_word(out, w).m.trace();
        REQUIRE(t1 == Catch::Approx(t0).margin(1e-9 * std::max(1.0, std::abs(t0))));
    }
}

TEST_CASE("one-parameter group law and curve invariance", "[flows]") {
    auto rep = base3();
    for (const char* id : {"a1", "sep"}) {
        FlowSpec spec_t{grp::standard_splitting(rep.presentation, id), lie::ell_functional(3), 0.6};
        FlowSpec spec_s = spec_t;
        spec_s.time = 0.35;
        FlowSpec spec_ts = spec_t;
        spec_ts.time = 0.95;
        auto one_shot = flows::goldman_flow(rep, spec_ts);
        auto two_step = flows::goldman_flow(flows::goldman_flow(rep, spec_t), spec_s);
        for (int g = 0; g < 4; ++g)
            REQUIRE((one_shot.images[g].m - two_step.images[g].m).max_abs() <
                    1e-9 * std::max(1.0, one_shot.images[g].m.max_abs()));

        // the curve image is untouched, so its Jordan projection is constant
        auto lam0 = lie::jordan_projection(grp::eval_word(rep, spec_t.splitting.curve));
        auto lam1 = lie::jordan_projection(grp::eval_word(one_shot, spec_t.splitting.curve));
        REQUIRE(lie::max_abs_diff(lam0, lam1) < 1e-10);
    }
}

TEST_CASE("relator is preserved along the flow", "[flows]") {
    auto rep = base3();
    for (const char* id : {"a1", "sep"}) {
        for (const auto& f : {lie::ell_functional(3), lie::lambda_k_functional(3, 2)}) {
            for (double t = -2.0; t <= 2.0 + 1e-9; t += 0.5) {
                FlowSpec spec{grp::standard_splitting(rep.presentation, id), f, t};
                auto out = flows::goldman_flow(rep, spec);
                REQUIRE(out.relator_residual() < 1e-8);
            }
        }
    }
    // finer grid on the twist along a1
    FlowSpec spec{grp::standard_splitting(rep.presentation, "a1"), lie::ell_functional(3), 0.0};
    for (double t = -2.0; t <= 2.0 + 1e-9; t += 0.1) {
        spec.time = t;
        REQUIRE(flows::goldman_flow(rep, spec).relator_residual() < 1e-8);
    }
}

TEST_CASE("trivial cover reproduces the downstairs flow", "[flows]") {
    auto rep = base3();
    AbelianHom triv{{1}, {{0}, {0}, {0}, {0}}};
    auto cover = grp::reidemeister_schreier(rep.presentation, triv);
    auto split = grp::standard_splitting(rep.presentation, "a1");
    auto cf = flows::build_cover_flow(cover, split);
    REQUIRE(cf.lifted.m == 1);
    REQUIRE(cf.lifted.d == 1);
    auto cover_rep = grp::restrict_to_cover(rep, cover);
    auto flowed_cover = flows::lifted_flow_apply(cover_rep, cf, lie::ell_functional(3), 0.45);
    auto flowed_down = flows::goldman_flow(rep, FlowSpec{split, lie::ell_functional(3), 0.45});
    // index-1 Schreier generators are the ambient generators themselves
    for (size_t i = 0; i < cover.subgroup_generators.size(); ++i) {
        const int g = cover.schreier_index[i][1];
        REQUIRE((flowed_cover.images[i].m - flowed_down.images[g].m).max_abs() < 1e-10);
    }
}

TEST_CASE("component flows commute", "[flows]") {
    auto rep = base3();
    AbelianHom hom{{2}, {{1}, {0}, {0}, {0}}};
    auto cover = grp::reidemeister_schreier(rep.presentation, hom);
    auto split = grp::standard_splitting(rep.presentation, "a2");
    auto cf = flows::build_cover_flow(cover, split);
    REQUIRE(cf.lifted.d == 2);
    auto cover_rep = grp::restrict_to_cover(rep, cover);
    // apply the component flows one at a time, in both orders
    auto apply_single = [&](const grp::Representation& r, int only, double t) {
        grp::Representation out = r;
        const auto& comp = cf.lifted.components[only];
        const Mat f_hat =
            lie::goldman_hat(grp::eval_word(r, comp), lie::ell_functional(3)).entries;
        const Mat flow = linalg::expm(f_hat * -t);
        for (size_t i = 0; i < cf.cover.schreier_index.size(); ++i) {
            const auto [coset, gen] = cf.cover.schreier_index[i];
            if (gen != cf.stable_gen || cf.component_of_coset[coset] != only) continue;
            out.images[i] = lie::SquareMatrix::unimodular(r.images[i].m * flow);
        }
        return out;
    };
    auto ab = apply_single(apply_single(cover_rep, 0, 0.5), 1, 0.5);
    auto ba = apply_single(apply_single(cover_rep, 1, 0.5), 0, 0.5);
    auto joint = flows::lifted_flow_apply(cover_rep, cf, lie::ell_functional(3), 0.5);
    for (size_t i = 0; i < cover.subgroup_generators.size(); ++i) {
        REQUIRE((ab.images[i].m - ba.images[i].m).max_abs() < 1e-9);
        REQUIRE((ab.images[i].m - joint.images[i].m).max_abs() < 1e-9);
    }
}

TEST_CASE("flow lifting along index-2 covers", "[flows]") {
    auto rep = base3();
    AbelianHom hom{{2}, {{1}, {0}, {0}, {0}}};
    auto cover = grp::reidemeister_schreier(rep.presentation, hom);
    std::mt19937_64 rng(2718);
    std::vector<Word> probes;
    for (int i = 0; i < 25; ++i) probes.push_back(random_subgroup_word(rng, cover, rep, 8));

    for (const char* id : {"a2", "a1"}) {
        auto split = grp::standard_splitting(rep.presentation, id);
        for (const auto& f : {lie::ell_functional(3), lie::lambda_k_functional(3, 2)}) {
            for (double t : {0.0, 0.7}) {
                const double dev = flows::flow_lift_compare(rep, split, f, t, cover, probes);
                REQUIRE(dev < 1e-8);
            }
        }
    }

    REQUIRE_THROWS_AS(
        flows::flow_lift_compare(rep, grp::standard_splitting(rep.presentation, "a1"),
                                 lie::ell_functional(3), 0.3, cover, {Word::gen(0)}),
        WordNotInSubgroup);
}

TEST_CASE("flow with negated time is the inverse flow", "[flows]") {
    auto rep = base3();
    for (const char* id : {"a1", "sep"}) {
        auto split = grp::standard_splitting(rep.presentation, id);
        auto fwd = flows::goldman_flow(rep, FlowSpec{split, lie::lambda_k_functional(3, 2), 0.4});
        auto bwd = flows::goldman_flow(fwd, FlowSpec{split, lie::lambda_k_functional(3, 2), -0.4});
        for (int g = 0; g < 4; ++g)
            REQUIRE((bwd.images[g].m - rep.images[g].m).max_abs() < 1e-9);
    }
}
