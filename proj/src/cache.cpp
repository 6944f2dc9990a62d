#include "modl/cache.hpp"

#include "modl/util.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace modl {
namespace cache {

std::string resolve_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    const char* env = std::getenv("MODL_CACHE_DIR");
    if (env && *env) return env;
    return {};
}

namespace {

void atomic_write(const fs::path& target, const std::string& content) {
    fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw std::runtime_error("cache: write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::optional<json> load_checked(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    json doc;
    try {
        in >> doc;
    } catch (...) {
        return std::nullopt;
    }
    if (!doc.contains("payload") || !doc.contains("content_hash")) return std::nullopt;
    if (doc.value("schema_version", -1) != kSchemaVersion) return std::nullopt;
    std::string payload = doc["payload"].dump();
    if (fnv1a_hex(payload) != doc["content_hash"].get<std::string>()) return std::nullopt;
    return doc;
}

json wrap(const std::string& kind, long k, long nmax, long prec_bits, json payload) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = kind;
    doc["k"] = k;
    doc["nmax"] = nmax;
    doc["prec_bits"] = prec_bits;
    doc["content_hash"] = fnv1a_hex(payload.dump());
    doc["payload"] = std::move(payload);
    return doc;
}

std::string eigen_name(long k, long nmax, long prec) {
    std::ostringstream os;
    os << "eigen_k" << k << "_n" << nmax << "_p" << prec << "_v" << kSchemaVersion << ".json";
    return os.str();
}

std::string plus_name(long k, long nmax) {
    std::ostringstream os;
    os << "plusbasis_k" << k << "_n" << nmax << "_v" << kSchemaVersion << ".json";
    return os.str();
}

} // namespace

void store_eigen(const std::string& dir, const std::vector<HeckeEigenform>& forms) {
    if (dir.empty() || forms.empty()) return;
    const auto& f0 = forms.front();
    json payload;
    payload["k"] = f0.k;
    payload["nmax"] = f0.nmax;
    payload["prec_bits"] = static_cast<long>(f0.prec_bits);
    json arr = json::array();
    for (const auto& f : forms) {
        json jf;
        jf["eigen_index"] = f.eigen_index;
        jf["fricke_sign"] = f.fricke_sign;
        json lam = json::array();
        for (long n = 1; n <= f.nmax; ++n) {
            json e;
            e["v"] = f.lam(n).value.hex_str();
            e["e"] = f.lam(n).err.hex_str();
            lam.push_back(std::move(e));
        }
        jf["lambda"] = std::move(lam);
        arr.push_back(std::move(jf));
    }
    payload["forms"] = std::move(arr);
    json doc = wrap("eigen", f0.k, f0.nmax, static_cast<long>(f0.prec_bits), std::move(payload));
    atomic_write(fs::path(dir) / eigen_name(f0.k, f0.nmax, f0.prec_bits), doc.dump(1));
}

std::optional<std::vector<HeckeEigenform>> load_eigen(const std::string& dir, long k, long nmax,
                                                      mpfr_prec_t prec_bits) {
    if (dir.empty() || !fs::is_directory(dir)) return std::nullopt;
    std::string prefix = "eigen_k" + std::to_string(k) + "_n";
    std::string suffix = "_p" + std::to_string(prec_bits) + "_v" + std::to_string(kSchemaVersion) +
                         ".json";
    fs::path best;
    long best_nmax = -1;
    for (const auto& ent : fs::directory_iterator(dir)) {
        std::string name = ent.path().filename().string();
        if (name.rfind(prefix, 0) != 0) continue;
        if (name.size() < suffix.size() ||
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
            continue;
        long file_nmax = std::atol(name.substr(prefix.size()).c_str());
        if (file_nmax >= nmax && file_nmax > best_nmax) {
            best_nmax = file_nmax;
            best = ent.path();
        }
    }
    if (best_nmax < 0) return std::nullopt;
    auto doc = load_checked(best);
    if (!doc) return std::nullopt;
    const json& payload = (*doc)["payload"];
    std::vector<HeckeEigenform> forms;
    for (const auto& jf : payload["forms"]) {
        HeckeEigenform f;
        f.k = payload["k"].get<long>();
        f.nmax = payload["nmax"].get<long>();
        f.prec_bits = static_cast<mpfr_prec_t>(payload["prec_bits"].get<long>());
        f.eigen_index = jf["eigen_index"].get<int>();
        f.fricke_sign = jf["fricke_sign"].get<int>();
        f.lambda.assign(static_cast<std::size_t>(f.nmax) + 1, ErrBoundedReal());
        long n = 1;
        for (const auto& e : jf["lambda"]) {
            Real v = Real::from_hex(e["v"].get<std::string>(), f.prec_bits);
            Real er = Real::from_hex(e["e"].get<std::string>(), 32);
            f.lambda[static_cast<std::size_t>(n)] = ErrBoundedReal(std::move(v), std::move(er));
            ++n;
        }
        if (n != f.nmax + 1) return std::nullopt;
        forms.push_back(std::move(f));
    }
    return forms;
}

void store_plus_basis(const std::string& dir, long k, const std::vector<HalfIntegralForm>& basis) {
    if (dir.empty() || basis.empty()) return;
    long nmax = basis.front().coeffs.nmax();
    json payload;
    payload["k"] = k;
    payload["nmax"] = nmax;
    json arr = json::array();
    for (const auto& h : basis) {
        json jf;
        jf["pivot"] = h.pivot;
        json cs = json::array();
        for (long n = 0; n <= nmax; ++n) cs.push_back(h.coeffs.coeff(n).get_str());
        jf["coeffs"] = std::move(cs);
        arr.push_back(std::move(jf));
    }
    payload["basis"] = std::move(arr);
    json doc = wrap("plusbasis", k, nmax, 0, std::move(payload));
    atomic_write(fs::path(dir) / plus_name(k, nmax), doc.dump(1));
}

std::optional<std::vector<HalfIntegralForm>> load_plus_basis(const std::string& dir, long k,
                                                             long nmax) {
    if (dir.empty() || !fs::is_directory(dir)) return std::nullopt;
    std::string prefix = "plusbasis_k" + std::to_string(k) + "_n";
    fs::path best;
    long best_nmax = -1;
    for (const auto& ent : fs::directory_iterator(dir)) {
        std::string name = ent.path().filename().string();
        if (name.rfind(prefix, 0) != 0) continue;
        long file_nmax = std::atol(name.substr(prefix.size()).c_str());
        if (file_nmax >= nmax && file_nmax > best_nmax) {
            best_nmax = file_nmax;
            best = ent.path();
        }
    }
    if (best_nmax < 0) return std::nullopt;
    auto doc = load_checked(best);
    if (!doc) return std::nullopt;
    const json& payload = (*doc)["payload"];
    long file_nmax = payload["nmax"].get<long>();
    std::vector<HalfIntegralForm> basis;
    for (const auto& jf : payload["basis"]) {
        HalfIntegralForm h;
        h.k = k;
        h.pivot = jf["pivot"].get<long>();
        h.coeffs = QSeries(file_nmax, mpq_class(k + 1, 2));
        long n = 0;
        for (const auto& c : jf["coeffs"]) {
            h.coeffs.set_coeff(n, mpq_class(c.get<std::string>()));
            ++n;
        }
        basis.push_back(std::move(h));
    }
    return basis;
}

std::vector<HeckeEigenform> eigenforms_cached(const std::string& dir, long k, long nmax,
                                              mpfr_prec_t prec_bits) {
    if (auto hit = load_eigen(dir, k, nmax, prec_bits)) return *hit;
    auto forms = eigenforms::eigenforms(k, nmax, prec_bits);
    if (!dir.empty() && !forms.empty()) store_eigen(dir, forms);
    return forms;
}

} // namespace cache
} // namespace modl
