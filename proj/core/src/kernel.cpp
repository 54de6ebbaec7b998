#include "ocsvm/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <thread>
#include <vector>

namespace ocsvm {

KernelSpec KernelSpec::make(KernelFamily family, std::optional<double> gamma,
                            std::optional<int> degree, std::optional<double> coef0) {
    switch (family) {
        case KernelFamily::linear:
            if (gamma || degree || coef0)
                throw ConfigError("KernelSpec: the linear kernel takes no parameters");
            return linear();
        case KernelFamily::rbf:
            if (!gamma) throw ConfigError("KernelSpec: rbf requires gamma");
            if (degree || coef0) throw ConfigError("KernelSpec: rbf takes only gamma");
            return rbf(*gamma);
        case KernelFamily::polynomial:
            if (gamma) throw ConfigError("KernelSpec: polynomial takes degree and coef0, not gamma");
            if (!degree) throw ConfigError("KernelSpec: polynomial requires degree");
            return polynomial(*degree, coef0.value_or(0.0));
    }
    throw ConfigError("KernelSpec: unknown family");
}

KernelSpec KernelSpec::parse(const std::string& text) {
    if (text == "linear") return linear();
    auto split_parts = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (true) {
            const std::size_t colon = s.find(':', pos);
            if (colon == std::string::npos) {
                parts.push_back(s.substr(pos));
                return parts;
            }
            parts.push_back(s.substr(pos, colon - pos));
            pos = colon + 1;
        }
    };
    const std::vector<std::string> parts = split_parts(text);
    auto to_double = [&](const std::string& s) {
        try {
            std::size_t used;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("KernelSpec: cannot parse number '" + s + "' in '" + text + "'");
        }
    };
    if (parts[0] == "rbf" && parts.size() == 2) return rbf(to_double(parts[1]));
    if ((parts[0] == "poly" || parts[0] == "polynomial") && (parts.size() == 2 || parts.size() == 3)) {
        const double deg = to_double(parts[1]);
        if (deg != static_cast<int>(deg))
            throw ConfigError("KernelSpec: polynomial degree must be an integer, got '" + parts[1] + "'");
        return polynomial(static_cast<int>(deg), parts.size() == 3 ? to_double(parts[2]) : 0.0);
    }
    throw ConfigError("KernelSpec: cannot parse '" + text +
                      "' (expected linear, rbf:<gamma> or poly:<degree>:<coef0>)");
}

std::string KernelSpec::to_string() const {
    char buf[80];
    switch (family_) {
        case KernelFamily::linear:
            return "linear";
        case KernelFamily::rbf:
            std::snprintf(buf, sizeof(buf), "rbf:%.17g", gamma_);
            return buf;
        case KernelFamily::polynomial:
            std::snprintf(buf, sizeof(buf), "poly:%d:%.17g", degree_, coef0_);
            return buf;
    }
    return "?";
}

double eval_kernel(const KernelSpec& spec, const FeatureView& x, const FeatureView& z) {
    switch (spec.family()) {
        case KernelFamily::linear:
            return x.dot(z);
        case KernelFamily::rbf:
            return std::exp(-spec.gamma() * x.squared_distance(z));
        case KernelFamily::polynomial: {
            const double base = x.dot(z) + spec.coef0();
            double r = 1.0;
            for (int k = 0; k < spec.degree(); ++k) r *= base;
            return r;
        }
    }
    throw ConfigError("eval_kernel: unknown kernel family");
}

namespace {

void check_signed_index(const Dataset& base, SignedIndex s) {
    if (s.sign != 1 && s.sign != -1)
        throw ConfigError("signed sample reference: sign must be +1 or -1, got " +
                          std::to_string(s.sign));
    if (s.index >= base.size())
        throw DataError("signed sample reference: index " + std::to_string(s.index) +
                        " out of range for " + std::to_string(base.size()) + " base samples");
}

} // namespace

double signed_kernel(const KernelSpec& spec, const Dataset& base, SignedIndex a, SignedIndex b) {
    check_signed_index(base, a);
    check_signed_index(base, b);
    const double k = eval_kernel(spec, base.row(a.index), base.row(b.index));
    return static_cast<double>(a.sign * b.sign) * k;
}

SquareMatrix gram(const KernelSpec& spec, std::span<const SignedIndex> items,
                  const Dataset& base, int threads) {
    for (const SignedIndex& s : items) check_signed_index(base, s);
    const std::size_t n = items.size();
    SquareMatrix g(n);

    auto fill_row = [&](std::size_t i) {
        const FeatureView xi = base.row(items[i].index);
        for (std::size_t j = i; j < n; ++j) {
            const double k = eval_kernel(spec, xi, base.row(items[j].index));
            g.at(i, j) = static_cast<double>(items[i].sign * items[j].sign) * k;
        }
    };

    if (threads <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fill_row(i);
    } else {
        const unsigned t_count = static_cast<unsigned>(threads);
        std::vector<std::thread> pool;
        pool.reserve(t_count);
        for (unsigned t = 0; t < t_count; ++t) {
            pool.emplace_back([&, t] {
                // Interleaved rows roughly balance the triangular workload.
                for (std::size_t i = t; i < n; i += t_count) fill_row(i);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.at(j, i) = g.at(i, j);
    return g;
}

} // namespace ocsvm
