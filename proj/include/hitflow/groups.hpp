#pragma once

#include <map>
#include <optional>
#include <string>

#include "hitflow/errors.hpp"
#include "hitflow/lie_core.hpp"

// Finitely presented surface/orbifold groups, word evaluation, finite abelian
// covers via Reidemeister-Schreier, and graph-of-groups splittings along the
// built-in simple closed curves.
namespace hitflow::grp {

using lie::SquareMatrix;
using linalg::Mat;

// --- words -------------------------------------------------------------------

struct Letter {
    int gen = 0;
    int exp = +1;  // +1 or -1
    friend bool operator==(const Letter&, const Letter&) = default;
};

// Freely reduced word in abstract generators.
struct Word {
    std::vector<Letter> letters;

    static Word one() { return {}; }
    static Word gen(int g, int e = +1) { return Word{{Letter{g, e}}}; }

    bool empty() const { return letters.empty(); }
    int length() const { return static_cast<int>(letters.size()); }

    Word& push(Letter l) {
        if (!letters.empty() && letters.back().gen == l.gen && letters.back().exp == -l.exp)
            letters.pop_back();
        else
            letters.push_back(l);
        return *this;
    }

    Word inverse() const {
        Word w;
        for (auto it = letters.rbegin(); it != letters.rend(); ++it)
            w.letters.push_back(Letter{it->gen, -it->exp});
        return w;
    }

    friend Word operator*(const Word& a, const Word& b) {
        Word w = a;
        for (const Letter& l : b.letters) w.push(l);
        return w;
    }

    friend bool operator==(const Word&, const Word&) = default;
    friend bool operator<(const Word& a, const Word& b) {
        if (a.letters.size() != b.letters.size()) return a.letters.size() < b.letters.size();
        for (size_t i = 0; i < a.letters.size(); ++i) {
            if (a.letters[i].gen != b.letters[i].gen) return a.letters[i].gen < b.letters[i].gen;
            if (a.letters[i].exp != b.letters[i].exp) return a.letters[i].exp < b.letters[i].exp;
        }
        return false;
    }

    Word conjugated_by(const Word& g) const { return g * (*this) * g.inverse(); }

    // cyclic reduction (for conjugacy-invariant quantities)
    Word cyclically_reduced() const {
        Word w = *this;
        while (w.letters.size() >= 2 && w.letters.front().gen == w.letters.back().gen &&
               w.letters.front().exp == -w.letters.back().exp) {
            w.letters.erase(w.letters.begin());
            w.letters.pop_back();
        }
        return w;
    }

    Word power(int k) const {
        Word w;
        Word base = k >= 0 ? *this : inverse();
        for (int i = 0; i < std::abs(k); ++i) w = w * base;
        return w;
    }
};

inline Word parse_word(const std::string& txt, const std::vector<std::string>& names) {
    // tokens separated by whitespace or '.', each "name" or "name^-1" / "name-"
    Word w;
    size_t i = 0;
    while (i < txt.size()) {
        while (i < txt.size() && (txt[i] == ' ' || txt[i] == '.' || txt[i] == '*')) ++i;
        if (i >= txt.size()) break;
        size_t j = i;
        while (j < txt.size() && txt[j] != ' ' && txt[j] != '.' && txt[j] != '*') ++j;
        std::string tok = txt.substr(i, j - i);
        int e = +1;
        if (tok.size() > 2 && tok.substr(tok.size() - 2) == "^-") {
            e = -1;
            tok = tok.substr(0, tok.size() - 2);
        } else if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
            e = -1;
            tok = tok.substr(0, tok.size() - 3);
        } else if (tok.back() == '\'') {
            e = -1;
            tok.pop_back();
        }
        auto it = std::find(names.begin(), names.end(), tok);
        if (it == names.end()) throw IndexOutOfRange("parse_word: unknown generator " + tok);
        w.push(Letter{static_cast<int>(it - names.begin()), e});
        i = j;
    }
    return w;
}

// --- presentations -------------------------------------------------------------

enum class PresentationKind { Free, Surface, Orbifold };

struct Presentation {
    PresentationKind kind = PresentationKind::Free;
    int generators = 0;
    std::vector<Word> relators;
    std::vector<std::string> names;
    int genus = 0;
    std::vector<int> cone_orders;

    static Presentation free_group(int rank) {
        Presentation p;
        p.kind = PresentationKind::Free;
        p.generators = rank;
        for (int i = 0; i < rank; ++i) p.names.push_back(std::string(1, char('a' + i)));
        return p;
    }

    // <a1 b1 ... ag bg | prod [ai, bi]>
    static Presentation surface(int genus) {
        Presentation p;
        p.kind = PresentationKind::Surface;
        p.genus = genus;
        p.generators = 2 * genus;
        Word rel;
        for (int i = 0; i < genus; ++i) {
            p.names.push_back("a" + std::to_string(i + 1));
            p.names.push_back("b" + std::to_string(i + 1));
            const int a = 2 * i, b = 2 * i + 1;
            rel = rel * Word{{{a, 1}, {b, 1}, {a, -1}, {b, -1}}};
        }
        p.relators.push_back(rel);
        return p;
    }

    // <s1..sk | si^{pi}, s1 s2 ... sk> on genus-0 underlying space
    static Presentation triangle_orbifold(int p_, int q_, int r_) {
        if (1.0 / p_ + 1.0 / q_ + 1.0 / r_ >= 1.0)
            throw NotHyperbolicSignature("triangle orbifold: 1/p+1/q+1/r must be < 1");
        Presentation p;
        p.kind = PresentationKind::Orbifold;
        p.cone_orders = {p_, q_, r_};
        p.generators = 3;
        p.names = {"s1", "s2", "s3"};
        for (int i = 0; i < 3; ++i) p.relators.push_back(Word::gen(i).power(p.cone_orders[i]));
        p.relators.push_back(Word{{{0, 1}, {1, 1}, {2, 1}}});
        return p;
    }

    double orbifold_euler_characteristic() const {
        switch (kind) {
            case PresentationKind::Surface:
                return 2.0 - 2.0 * genus;
            case PresentationKind::Orbifold: {
                double chi = 2.0 - 2.0 * genus;
                for (int c : cone_orders) chi -= 1.0 - 1.0 / c;
                return chi;
            }
            default:
                return 1.0 - generators;
        }
    }
};

// --- representations -----------------------------------------------------------

// Relator residual: distance of rho(R) from +-I (projective identity).
inline double projective_identity_residual(const Mat& m) {
    const Mat id = Mat::identity(m.rows);
    return std::min((m - id).max_abs(), (m + id).max_abs());
}

struct Representation {
    Presentation presentation;
    std::vector<SquareMatrix> images;

    int dim() const { return images.empty() ? 0 : images.front().dim(); }

    double relator_residual() const;
};

inline SquareMatrix eval_word(const Representation& rep, const Word& w) {
    const int n = rep.dim();
    Mat acc = Mat::identity(n);
    for (const Letter& l : w.letters) {
        if (l.gen < 0 || l.gen >= static_cast<int>(rep.images.size()))
            throw IndexOutOfRange("eval_word: generator index out of range");
        const Mat& g = rep.images[l.gen].m;
        acc = (l.exp > 0) ? acc * g : acc * linalg::inverse(g);
    }
    return SquareMatrix::unimodular(std::move(acc));
}

// Long-double evaluation used for residual checks; letter-by-letter products
// of large-norm images need the extra mantissa to certify small residuals.
// Optionally reports the largest intermediate Frobenius norm, the natural
// backward-error scale of the evaluation.
inline Mat eval_word_extended(const Representation& rep, const Word& w,
                              double* intermediate_scale = nullptr) {
    const int n = rep.dim();
    std::vector<long double> acc(static_cast<size_t>(n) * n, 0.0L);
    for (int i = 0; i < n; ++i) acc[static_cast<size_t>(i) * n + i] = 1.0L;
    std::vector<long double> tmp(acc.size());
    long double scale = std::sqrt(static_cast<long double>(n));
    for (const Letter& l : w.letters) {
        if (l.gen < 0 || l.gen >= static_cast<int>(rep.images.size()))
            throw IndexOutOfRange("eval_word_extended: generator index out of range");
        Mat g = rep.images[l.gen].m;
        if (l.exp < 0) g = linalg::inverse(g);
        std::fill(tmp.begin(), tmp.end(), 0.0L);
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k) {
                const long double v = acc[static_cast<size_t>(r) * n + k];
                if (v == 0.0L) continue;
                for (int c = 0; c < n; ++c)
                    tmp[static_cast<size_t>(r) * n + c] +=
                        v * static_cast<long double>(g(k, c));
            }
        acc.swap(tmp);
        long double fr = 0;
        for (long double x : acc) fr += x * x;
        scale = std::max(scale, std::sqrt(fr));
    }
    Mat out(n, n);
    for (size_t i = 0; i < acc.size(); ++i) out.a[i] = static_cast<double>(acc[i]);
    if (intermediate_scale) *intermediate_scale = static_cast<double>(scale);
    return out;
}

// Backward-stable relator residual: distance of rho(R) from the projective
// identity, relative to the scale the evaluation passes through. Double
// storage of large conjugated images makes an absolute residual meaningless
// below ~1e-16 * intermediate scale.
inline double Representation::relator_residual() const {
    double r = 0;
    for (const Word& rel : presentation.relators) {
        double scale = 1.0;
        const Mat value = eval_word_extended(*this, rel, &scale);
        r = std::max(r, projective_identity_residual(value) / std::max(1.0, scale));
    }
    return r;
}

// Stable Jordan projection of a word image: extended-precision products, and
// the inverse word evaluated as its own product so both ends of the spectrum
// carry relative accuracy.
inline lie::JordanVector jordan_of_word(const Representation& rep, const Word& w,
                                        double tol_eig = lie::kDefaultEigGapTol) {
    return lie::jordan_two_sided(SquareMatrix::unimodular(eval_word_extended(rep, w)),
                                 SquareMatrix::unimodular(eval_word_extended(rep, w.inverse())),
                                 tol_eig);
}

// Compose with the principal embedding into SL_n.
inline Representation embed(const Representation& rep2, int n) {
    Representation out;
    out.presentation = rep2.presentation;
    for (const SquareMatrix& g : rep2.images) out.images.push_back(lie::sym_embed(g.m, n));
    return out;
}

// --- splittings along simple closed curves -------------------------------------

enum class SplittingKind { Hnn, Amalgam };

// Graph-of-groups data for one of the built-in simple closed curves of the
// genus-2 surface. HNN case: one vertex group plus a stable letter conjugating
// the edge curve; amalgam case: two vertex groups sharing the curve.
struct Splitting {
    SplittingKind kind = SplittingKind::Hnn;
    Word curve;
    std::vector<std::vector<Word>> vertex_generators;  // per vertex, words in ambient gens
    Word stable_letter;                                // hnn only
    Word inclusion_near, inclusion_far;                // amalgam only: curve in each vertex group
    std::string curve_id;

    // words regenerating the ambient generators from the splitting's pieces
    std::vector<Word> reassembly() const {
        std::vector<Word> out;
        for (const auto& v : vertex_generators)
            for (const Word& w : v) out.push_back(w);
        if (kind == SplittingKind::Hnn) out.push_back(stable_letter);
        return out;
    }
};

// Built-in splittings of the genus-2 surface group. "a1"/"a2" are the HNN
// splittings along those handle curves (stable letter the dual b-curve);
// "sep" is the amalgam along the separating curve [a1,b1].
inline Splitting standard_splitting(const Presentation& pres, const std::string& curve_id) {
    if (pres.kind != PresentationKind::Surface || pres.genus != 2)
        throw UnsupportedCurve("standard_splitting: built-ins cover the genus-2 surface only");
    const int a1 = 0, b1 = 1, a2 = 2, b2 = 3;
    Splitting s;
    s.curve_id = curve_id;
    if (curve_id == "a1") {
        s.kind = SplittingKind::Hnn;
        s.curve = Word::gen(a1);
        s.vertex_generators = {{Word::gen(a1), Word::gen(a2), Word::gen(b2)}};
        s.stable_letter = Word::gen(b1);
    } else if (curve_id == "a2") {
        s.kind = SplittingKind::Hnn;
        s.curve = Word::gen(a2);
        s.vertex_generators = {{Word::gen(a2), Word::gen(a1), Word::gen(b1)}};
        s.stable_letter = Word::gen(b2);
    } else if (curve_id == "sep") {
        s.kind = SplittingKind::Amalgam;
        s.curve = Word{{{a1, 1}, {b1, 1}, {a1, -1}, {b1, -1}}};
        s.vertex_generators = {{Word::gen(a1), Word::gen(b1)}, {Word::gen(a2), Word::gen(b2)}};
        s.inclusion_near = s.curve;
        s.inclusion_far = Word{{{b2, 1}, {a2, 1}, {b2, -1}, {a2, -1}}};  // [a2,b2]^{-1}
    } else {
        throw UnsupportedCurve("standard_splitting: unsupported curve id " + curve_id);
    }
    return s;
}

// --- finite abelian covers -------------------------------------------------------

// Homomorphism onto a finite abelian group, encoded as a product of cyclic
// factors Z/m_i with one image vector per generator.
struct AbelianHom {
    std::vector<int> moduli;
    std::vector<std::vector<int>> images;  // per generator

    std::vector<int> zero() const { return std::vector<int>(moduli.size(), 0); }

    std::vector<int> add(const std::vector<int>& x, const std::vector<int>& y) const {
        std::vector<int> z(moduli.size());
        for (size_t i = 0; i < moduli.size(); ++i) z[i] = (x[i] + y[i]) % moduli[i];
        return z;
    }
    std::vector<int> neg(const std::vector<int>& x) const {
        std::vector<int> z(moduli.size());
        for (size_t i = 0; i < moduli.size(); ++i) z[i] = (moduli[i] - x[i]) % moduli[i];
        return z;
    }
    std::vector<int> apply(const Word& w) const {
        std::vector<int> z = zero();
        for (const Letter& l : w.letters) {
            const auto& g = images.at(l.gen);
            z = add(z, l.exp > 0 ? g : neg(g));
        }
        return z;
    }
};

struct CoverData {
    Presentation base;
    AbelianHom hom;
    int index = 0;
    std::vector<std::vector<int>> cosets;    // coset labels (image elements), cosets[0] = 0
    std::vector<Word> transversal;           // representative words, transversal[0] = 1
    std::vector<Word> subgroup_generators;   // Schreier generators, ambient letters
    std::vector<std::array<int, 2>> schreier_index;  // (coset, ambient gen) per subgroup gen
    std::vector<Word> rewritten_relators;    // relators of the cover, in subgroup gens

    int coset_of(const std::vector<int>& label) const {
        for (size_t i = 0; i < cosets.size(); ++i)
            if (cosets[i] == label) return static_cast<int>(i);
        throw IndexOutOfRange("CoverData: label outside image");
    }

    // Reidemeister rewriting of a kernel word into subgroup generators
    // (indices into subgroup_generators, as a Word over those).
    Word rewrite(const Word& w) const;

    // expand a word over subgroup generators into ambient letters
    Word expand(const Word& w_sub) const {
        Word out;
        for (const Letter& l : w_sub.letters) {
            const Word& g = subgroup_generators.at(l.gen);
            out = out * (l.exp > 0 ? g : g.inverse());
        }
        return out;
    }
};

inline CoverData reidemeister_schreier(const Presentation& pres, const AbelianHom& hom) {
    for (const Word& r : pres.relators)
        if (hom.apply(r) != hom.zero())
            throw HomNotWellDefined("reidemeister_schreier: relator has nonzero image");
    CoverData cd;
    cd.base = pres;
    cd.hom = hom;
    // enumerate the image subgroup by BFS over generator images (prefix-closed
    // Schreier transversal of shortest words)
    cd.cosets.push_back(hom.zero());
    cd.transversal.push_back(Word::one());
    for (size_t head = 0; head < cd.cosets.size(); ++head) {
        for (int g = 0; g < pres.generators; ++g) {
            for (int e : {+1, -1}) {
                auto label = hom.add(cd.cosets[head],
                                     e > 0 ? hom.images[g] : hom.neg(hom.images[g]));
                bool known = false;
                for (const auto& c : cd.cosets)
                    if (c == label) {
                        known = true;
                        break;
                    }
                if (!known) {
                    cd.cosets.push_back(label);
                    cd.transversal.push_back(cd.transversal[head] * Word::gen(g, e));
                }
            }
        }
    }
    cd.index = static_cast<int>(cd.cosets.size());
    // Schreier generators r_c g r_{c g}^{-1}, skipping the freely trivial ones
    for (int c = 0; c < cd.index; ++c) {
        for (int g = 0; g < pres.generators; ++g) {
            const int cg = cd.coset_of(hom.add(cd.cosets[c], hom.images[g]));
            Word s = cd.transversal[c] * Word::gen(g) * cd.transversal[cg].inverse();
            if (!s.empty()) {
                cd.subgroup_generators.push_back(std::move(s));
                cd.schreier_index.push_back({c, g});
            }
        }
    }
    // rewritten relators: rewrite r_c R r_c^{-1} for every coset and relator
    for (int c = 0; c < cd.index; ++c)
        for (const Word& r : pres.relators) {
            Word conj = r.conjugated_by(cd.transversal[c]);
            Word rw = cd.rewrite(conj);
            if (!rw.empty()) cd.rewritten_relators.push_back(std::move(rw));
        }
    return cd;
}

inline Word CoverData::rewrite(const Word& w) const {
    if (hom.apply(w) != hom.zero())
        throw WordNotInSubgroup("rewrite: word does not lie in the cover subgroup");
    auto sub_gen_at = [&](int coset, int gen) -> std::optional<int> {
        for (size_t i = 0; i < schreier_index.size(); ++i)
            if (schreier_index[i][0] == coset && schreier_index[i][1] == gen)
                return static_cast<int>(i);
        return std::nullopt;  // freely trivial Schreier generator
    };
    Word out;
    std::vector<int> state = hom.zero();
    for (const Letter& l : w.letters) {
        if (l.exp > 0) {
            const int c = coset_of(state);
            if (auto idx = sub_gen_at(c, l.gen)) out.push(Letter{*idx, +1});
            state = hom.add(state, hom.images[l.gen]);
        } else {
            state = hom.add(state, hom.neg(hom.images[l.gen]));
            const int c = coset_of(state);
            if (auto idx = sub_gen_at(c, l.gen)) out.push(Letter{*idx, -1});
        }
    }
    return out;
}

// restriction of a representation to the cover subgroup (images of the
// Schreier generators); presentation = the rewritten one
inline Representation restrict_to_cover(const Representation& rep, const CoverData& cd) {
    Representation out;
    out.presentation.kind = PresentationKind::Free;
    out.presentation.generators = static_cast<int>(cd.subgroup_generators.size());
    out.presentation.relators = cd.rewritten_relators;
    for (size_t i = 0; i < cd.subgroup_generators.size(); ++i)
        out.presentation.names.push_back("s" + std::to_string(i));
    for (const Word& w : cd.subgroup_generators) out.images.push_back(eval_word(rep, w));
    return out;
}

// abelianization rank of the cover presentation (generators minus the rank of
// the relators' exponent-sum matrix)
inline int abelianization_rank(const CoverData& cd) {
    const int g = static_cast<int>(cd.subgroup_generators.size());
    Mat rel(static_cast<int>(cd.rewritten_relators.size()), g);
    for (size_t r = 0; r < cd.rewritten_relators.size(); ++r)
        for (const Letter& l : cd.rewritten_relators[r].letters) rel(static_cast<int>(r), l.gen) += l.exp;
    return g - linalg::rank(rel, 1e-9);
}

struct LiftedCurve {
    int m = 1;                    // stabilizer order: smallest k with curve^k in the subgroup
    int d = 1;                    // number of components
    std::vector<Word> components;        // in subgroup generators
    std::vector<Word> components_ambient;  // r c^m r^{-1} in ambient letters
    std::vector<Word> conjugators;       // the transversal words r
};

inline LiftedCurve lift_curve(const CoverData& cd, const Word& curve) {
    if (curve.empty()) throw IndexOutOfRange("lift_curve: trivial curve");
    LiftedCurve lc;
    const auto phi = cd.hom.apply(curve);
    auto acc = phi;
    lc.m = 1;
    while (acc != cd.hom.zero()) {
        acc = cd.hom.add(acc, phi);
        ++lc.m;
    }
    lc.d = cd.index / lc.m;
    // components indexed by cosets modulo the cyclic subgroup generated by phi
    std::vector<bool> used(cd.index, false);
    for (int c = 0; c < cd.index; ++c) {
        if (used[c]) continue;
        auto label = cd.cosets[c];
        for (int k = 0; k < lc.m; ++k) {
            used[cd.coset_of(label)] = true;
            label = cd.hom.add(label, phi);
        }
        const Word r = cd.transversal[c];
        Word amb = curve.power(lc.m).conjugated_by(r);
        lc.conjugators.push_back(r);
        lc.components.push_back(cd.rewrite(amb));
        lc.components_ambient.push_back(std::move(amb));
    }
    return lc;
}

// --- regularity probe ------------------------------------------------------------

struct RegularityVerdict {
    bool regular = true;
    Word witness;  // involution s with s x s^{-1} = x^{-1}, when found
};

// Search all short words s for an involution conjugating rho(x) to its
// inverse. Exhaustion up to the radius is evidence of regularity, not proof.
inline RegularityVerdict regularity_probe(const Representation& rep2, const Word& x, int radius,
                                          double tol = 1e-7) {
    const SquareMatrix mx = eval_word(rep2, x);
    if (mx.dim() != 2) throw NotHyperbolic("regularity_probe: expects a PSL2 representation");
    if (std::abs(mx.m.trace()) <= 2.0 + 1e-9)
        throw NotHyperbolic("regularity_probe: rho(x) must be hyperbolic");
    const Mat mx_inv = linalg::inverse(mx.m);
    const int g = rep2.presentation.generators;
    RegularityVerdict verdict;

    struct Node {
        Word w;
        Mat m;
    };
    std::vector<Node> frontier{{Word::one(), Mat::identity(2)}};
    for (int depth = 0; depth < radius && verdict.regular; ++depth) {
        std::vector<Node> next;
        for (const Node& node : frontier) {
            for (int gi = 0; gi < g && verdict.regular; ++gi) {
                for (int e : {+1, -1}) {
                    if (!node.w.empty() && node.w.letters.back().gen == gi &&
                        node.w.letters.back().exp == -e)
                        continue;
                    Node child{node.w * Word::gen(gi, e),
                               node.m * (e > 0 ? rep2.images[gi].m
                                               : linalg::inverse(rep2.images[gi].m))};
                    const Mat& s = child.m;
                    const bool involution = projective_identity_residual(s * s) <= tol;
                    if (involution) {
                        const Mat conj = s * mx.m * linalg::inverse(s);
                        if (projective_identity_residual(conj * mx.m) <= tol ||
                            (conj - mx_inv).max_abs() <= tol ||
                            (conj + mx_inv).max_abs() <= tol) {
                            verdict.regular = false;
                            verdict.witness = child.w;
                            break;
                        }
                    }
                    next.push_back(std::move(child));
                }
            }
            if (!verdict.regular) break;
        }
        frontier.swap(next);
    }
    return verdict;
}

}  // namespace hitflow::grp
