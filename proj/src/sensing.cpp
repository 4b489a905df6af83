#include "ncce/sensing.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace ncce {

namespace {

// code c -> j^c
const cplx kAlphabet[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

int alphabet_code(cplx v) {
    for (int c = 0; c < 4; ++c)
        if (v == kAlphabet[c])
            return c;
    throw InvalidInputError("alphabet_code: entry not in {1, j, -1, -j}");
}

} // namespace

bool in_alphabet(cplx v) {
    for (const auto& s : kAlphabet)
        if (v == s)
            return true;
    return false;
}

cplx quantize_to_alphabet(cplx v) {
    const double re = v.real(), im = v.imag();
    const double are = std::abs(re), aim = std::abs(im);
    if (are > aim)
        return re > 0.0 ? kAlphabet[0] : kAlphabet[2];
    if (aim > are)
        return im > 0.0 ? kAlphabet[1] : kAlphabet[3];
    // |re| == |im|: exact diagonal (or zero). Both neighbors are equidistant;
    // take the one with the smaller phase angle in [0, 2*pi). Zero maps to 1.
    if (re > 0.0)
        return kAlphabet[0];
    if (im > 0.0)
        return kAlphabet[1];
    if (re < 0.0)
        return kAlphabet[2];
    return kAlphabet[0];
}

MatC quantize_matrix(const MatC& a) {
    MatC q(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            q(i, j) = quantize_to_alphabet(a(i, j));
    return q;
}

MatC sample_quantized_matrix(int m, int n, Rng& rng) {
    if (m < 1 || n < 1)
        throw InvalidInputError("sample_quantized_matrix: m, n must be >= 1");
    MatC a(m, n);
    // Row-major fill order so the draw sequence is part of the documented
    // reproducibility contract.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = kAlphabet[rng.two_bits()];
    return a;
}

MatC sample_gaussian_matrix(int m_cs, int n, Rng& rng) {
    if (m_cs < 1 || n < 1)
        throw InvalidInputError("sample_gaussian_matrix: m_cs, n must be >= 1");
    const double sigma = std::sqrt(1.0 / (2.0 * static_cast<double>(n)));
    MatC a(m_cs, n);
    for (int i = 0; i < m_cs; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = rng.complex_gaussian(sigma);
    return a;
}

MatC row_pseudoinverse(const MatC& a_cs) {
    if (a_cs.rows() > a_cs.cols())
        throw InvalidInputError("row_pseudoinverse: requires M_CS <= N");
    const MatC gram = a_cs * a_cs.adjoint();

    Eigen::SelfAdjointEigenSolver<MatC> es(gram);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw DegenerateMatrixError("row_pseudoinverse: Gram matrix is near rank deficient");

    Eigen::LLT<MatC> llt(gram);
    if (llt.info() != Eigen::Success)
        throw DegenerateMatrixError("row_pseudoinverse: Cholesky factorization failed");
    // A^+ = A^H G^{-1} = (G^{-1} A)^H since G is Hermitian.
    return llt.solve(a_cs).adjoint();
}

SensingEnsemble build_ensemble(int m, int m_cs, int n, std::uint64_t seed) {
    if (2 * m_cs > m)
        throw ConfigError("build_ensemble: requires M >= 2*M_CS");
    if (m_cs > n)
        throw ConfigError("build_ensemble: requires M_CS <= N");

    Rng rng_a(derive_seed(seed, streams::kEnsembleQuantized));
    Rng rng_cs(derive_seed(seed, streams::kEnsembleGaussian));

    SensingEnsemble e;
    e.seed = seed;
    const MatC a = sample_quantized_matrix(m, n, rng_a);
    e.a_cs = sample_gaussian_matrix(m_cs, n, rng_cs);
    const MatC pinv = row_pseudoinverse(e.a_cs);
    e.a_pr = a * pinv;
    const MatC product = e.a_pr * e.a_cs;
    e.a_final = quantize_matrix(product);
    e.mismatch_fro_rel = (product - e.a_final).norm() / e.a_final.norm();
    return e;
}

CoherentMeasurements measure_coherent(const MatC& a, const VecC& h,
                                      double noise_std, Rng& rng) {
    if (a.cols() != h.size())
        throw InvalidInputError("measure_coherent: dimension mismatch");
    CoherentMeasurements y;
    y.values = a * h;
    if (noise_std > 0.0) {
        const double sigma = noise_std / std::sqrt(2.0);
        for (Eigen::Index b = 0; b < y.values.size(); ++b)
            y.values[b] += rng.complex_gaussian(sigma);
    }
    return y;
}

RssMeasurements measure_rss(const MatC& a, const VecC& h, double noise_std,
                            Rng& rng) {
    if (a.cols() != h.size())
        throw InvalidInputError("measure_rss: dimension mismatch");
    VecC v = a * h;
    if (noise_std > 0.0) {
        const double sigma = noise_std / std::sqrt(2.0);
        for (Eigen::Index b = 0; b < v.size(); ++b)
            v[b] += rng.complex_gaussian(sigma);
    }
    RssMeasurements y;
    y.noise_variance = noise_std * noise_std;
    y.values = v.cwiseAbs2();
    return y;
}

namespace {

nlohmann::json complex_matrix_to_json(const MatC& a) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            arr.push_back({a(i, j).real(), a(i, j).imag()});
    return arr;
}

MatC complex_matrix_from_json(const nlohmann::json& arr, int rows, int cols) {
    MatC a(rows, cols);
    std::size_t k = 0;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j, ++k)
            a(i, j) = cplx(arr.at(k).at(0).get<double>(), arr.at(k).at(1).get<double>());
    return a;
}

} // namespace

void save_ensemble_json(const std::string& path, const SensingEnsemble& e) {
    nlohmann::json j;
    j["m"] = e.m();
    j["m_cs"] = e.m_cs();
    j["n"] = e.n();
    j["seed"] = e.seed;
    j["mismatch_fro_rel"] = e.mismatch_fro_rel;
    nlohmann::json codes = nlohmann::json::array();
    for (Eigen::Index i = 0; i < e.a_final.rows(); ++i)
        for (Eigen::Index jj = 0; jj < e.a_final.cols(); ++jj)
            codes.push_back(alphabet_code(e.a_final(i, jj)));
    j["a_final_codes"] = std::move(codes);
    j["a_cs"] = complex_matrix_to_json(e.a_cs);
    j["a_pr"] = complex_matrix_to_json(e.a_pr);

    std::ofstream out(path);
    if (!out)
        throw ConfigError("save_ensemble_json: cannot open " + path);
    out << j.dump();
}

SensingEnsemble load_ensemble_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("load_ensemble_json: cannot open " + path);
    nlohmann::json j;
    in >> j;

    const int m = j.at("m").get<int>();
    const int m_cs = j.at("m_cs").get<int>();
    const int n = j.at("n").get<int>();

    SensingEnsemble e;
    e.seed = j.at("seed").get<std::uint64_t>();
    e.mismatch_fro_rel = j.at("mismatch_fro_rel").get<double>();
    e.a_final.resize(m, n);
    const auto& codes = j.at("a_final_codes");
    std::size_t k = 0;
    for (int i = 0; i < m; ++i)
        for (int jj = 0; jj < n; ++jj, ++k)
            e.a_final(i, jj) = kAlphabet[codes.at(k).get<int>() & 3];
    e.a_cs = complex_matrix_from_json(j.at("a_cs"), m_cs, n);
    e.a_pr = complex_matrix_from_json(j.at("a_pr"), m, m_cs);
    return e;
}

} // namespace ncce
