#include "liemix/mixture_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "liemix/errors.hpp"

namespace liemix {

namespace {

constexpr int kFormatVersion = 1;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

/// Token stream skipping comments and blank lines.
class Tokens {
public:
    explicit Tokens(std::istream& is) {
        std::string line, all;
        while (std::getline(is, line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            all += line;
            all += '\n';
        }
        ss_.str(all);
    }

    void keyword(const char* k) {
        std::string tok;
        if (!(ss_ >> tok) || tok != k) throw ParseError(std::string("mixture file: expected '") + k + "', got '" + tok + "'");
    }

    template <typename T>
    T value(const char* what) {
        T v{};
        if (!(ss_ >> v)) throw ParseError(std::string("mixture file: cannot read ") + what);
        return v;
    }

    bool at_end() {
        std::string rest;
        return !(ss_ >> rest);
    }

private:
    std::istringstream ss_;
};

}  // namespace

void write_mixture(std::ostream& os, const Mixture& m) {
    const Group& g = m.group();
    os << "format_version " << kFormatVersion << '\n';
    os << "group " << g.name() << '\n';
    os << "components " << m.size() << '\n';
    for (const WeightedCgd& c : m) {
        os << "component " << fmt(c.weight) << '\n';
        const Eigen::MatrixXd mean = c.dist.mean().matrix();
        os << "mean";
        for (int r = 0; r < mean.rows(); ++r)
            for (int col = 0; col < mean.cols(); ++col) os << ' ' << fmt(mean(r, col));
        os << "\ncov";
        const Matrix& cov = c.dist.cov();
        for (int r = 0; r < cov.rows(); ++r)
            for (int col = 0; col < cov.cols(); ++col) os << ' ' << fmt(cov(r, col));
        os << '\n';
    }
}

Mixture read_mixture(std::istream& is) {
    Tokens t(is);
    t.keyword("format_version");
    const int version = t.value<int>("format_version");
    if (version != kFormatVersion) throw ParseError("mixture file: unsupported format_version " + std::to_string(version));
    t.keyword("group");
    const Group g = Group::parse(t.value<std::string>("group name"));
    t.keyword("components");
    const auto n = t.value<long long>("component count");
    if (n < 0) throw ParseError("mixture file: negative component count");
    const int md = g.matrix_dim();
    const int p = g.algebra_dim();
    Mixture m(g);
    for (long long i = 0; i < n; ++i) {
        t.keyword("component");
        const double w = t.value<double>("weight");
        t.keyword("mean");
        Eigen::MatrixXd mean(md, md);
        for (int r = 0; r < md; ++r)
            for (int c = 0; c < md; ++c) mean(r, c) = t.value<double>("mean entry");
        t.keyword("cov");
        Matrix cov(p, p);
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c) cov(r, c) = t.value<double>("covariance entry");
        m.add(w, CGD(g.from_matrix(mean, 1e-6), cov));
    }
    if (!t.at_end()) throw ParseError("mixture file: trailing content after the last component");
    return m;
}

}  // namespace liemix
