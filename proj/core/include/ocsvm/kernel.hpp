#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "ocsvm/dataset.hpp"
#include "ocsvm/error.hpp"
#include "ocsvm/matrix.hpp"

namespace ocsvm {

enum class KernelFamily { linear, rbf, polynomial };

// Validated kernel description. Construct through the factories (or parse())
// so parameter rules hold: rbf needs gamma > 0, polynomial needs degree >= 1
// and coef0 >= 0, linear takes no parameters at all.
class KernelSpec {
public:
    static KernelSpec linear() { return KernelSpec(KernelFamily::linear, 0.0, 0, 0.0); }

    static KernelSpec rbf(double gamma) {
        if (!(gamma > 0.0)) throw ConfigError("KernelSpec: rbf gamma must be > 0, got " + std::to_string(gamma));
        return KernelSpec(KernelFamily::rbf, gamma, 0, 0.0);
    }

    static KernelSpec polynomial(int degree, double coef0) {
        if (degree < 1) throw ConfigError("KernelSpec: polynomial degree must be >= 1, got " + std::to_string(degree));
        if (coef0 < 0.0) throw ConfigError("KernelSpec: polynomial coef0 must be >= 0, got " + std::to_string(coef0));
        return KernelSpec(KernelFamily::polynomial, 0.0, degree, coef0);
    }

    // Builds a spec from loosely-typed parts (e.g. parsed configuration).
    // Parameters that do not belong to the family are rejected; in
    // particular the linear kernel accepts none.
    static KernelSpec make(KernelFamily family, std::optional<double> gamma,
                           std::optional<int> degree, std::optional<double> coef0);

    // Text forms: "linear", "rbf:<gamma>", "poly:<degree>:<coef0>".
    static KernelSpec parse(const std::string& text);
    std::string to_string() const;

    KernelFamily family() const { return family_; }
    double gamma() const { return gamma_; }
    int degree() const { return degree_; }
    double coef0() const { return coef0_; }

    bool operator==(const KernelSpec&) const = default;

private:
    KernelSpec(KernelFamily f, double g, int d, double c)
        : family_(f), gamma_(g), degree_(d), coef0_(c) {}

    KernelFamily family_;
    double gamma_;
    int degree_;
    double coef0_;
};

// Reference to a base sample together with a reflection sign (+1 keeps the
// sample, -1 stands for its reflection about the origin).
struct SignedIndex {
    std::size_t index = 0;
    int sign = +1;
};

// k(x, z) for raw feature vectors. Throws DataError on dimension mismatch.
double eval_kernel(const KernelSpec& spec, const FeatureView& x, const FeatureView& z);

// Kernel value between two possibly-reflected base samples. Reflection is
// realized as sign(a) * sign(b) * k(x_a, x_b): the signs multiply OUTSIDE the
// kernel, which is exact for the linear kernel and defines the reflected
// matrix for the nonlinear families (consistent with a block Gram matrix
// [[K, -K], [-K, K]]).
double signed_kernel(const KernelSpec& spec, const Dataset& base, SignedIndex a, SignedIndex b);

// Dense Gram matrix over a list of signed sample references. Each entry is
// computed once and mirrored, so the result is exactly symmetric. Rows may
// be filled by several threads; the result is identical regardless of
// thread count.
SquareMatrix gram(const KernelSpec& spec, std::span<const SignedIndex> items,
                  const Dataset& base, int threads = 1);

} // namespace ocsvm
