#pragma once

// JSON certificates for every machine-checkable artifact the tool emits.
// Schema conventions: integers that can exceed 2^63 and exact rationals are
// decimal strings ("num" or "num/den"); machine doubles are JSON numbers
// (serialized losslessly); enums are lowercase strings. Field order is fixed,
// so identical inputs produce byte-identical documents modulo the timestamp.

#include <gmpxx.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "klucas/bounds.hpp"
#include "klucas/interval.hpp"
#include "klucas/lattice.hpp"
#include "klucas/pipelines.hpp"
#include "klucas/roots.hpp"
#include "klucas/smooth.hpp"

namespace klucas {

using certificate_json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "klucas";
inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Exact-number <-> decimal-string helpers.

inline std::string z_to_string(const mpz_class& v) { return v.get_str(); }

inline mpz_class z_from_string(const std::string& s) {
    mpz_class v;
    if (s.empty() || mpz_set_str(v.get_mpz_t(), s.c_str(), 10) != 0)
        throw std::domain_error("certificate: bad integer literal '" + s + "'");
    return v;
}

inline std::string q_to_string(const mpq_class& v) { return v.get_str(); }

inline mpq_class q_from_string(const std::string& s) {
    mpq_class v;
    if (s.empty() || mpq_set_str(v.get_mpq_t(), s.c_str(), 10) != 0)
        throw std::domain_error("certificate: bad rational literal '" + s + "'");
    v.canonicalize();
    return v;
}

inline std::vector<std::string> z_vec_to_strings(const std::vector<mpz_class>& vs) {
    std::vector<std::string> out;
    out.reserve(vs.size());
    for (const mpz_class& v : vs) out.push_back(z_to_string(v));
    return out;
}

inline std::vector<mpz_class> z_vec_from_strings(const std::vector<std::string>& ss) {
    std::vector<mpz_class> out;
    out.reserve(ss.size());
    for (const std::string& s : ss) out.push_back(z_from_string(s));
    return out;
}

// ---------------------------------------------------------------------------
// Enum names.

inline std::string deweger_status_name(DewegerStatus s) {
    return s == DewegerStatus::ok ? "ok" : "hypothesis_failed";
}

inline DewegerStatus deweger_status_from_name(const std::string& s) {
    if (s == "ok") return DewegerStatus::ok;
    if (s == "hypothesis_failed") return DewegerStatus::hypothesis_failed;
    throw std::domain_error("certificate: unknown reduction status '" + s + "'");
}

inline std::string large_k_status_name(LargeKStatus s) {
    switch (s) {
        case LargeKStatus::reached: return "reached";
        case LargeKStatus::no_progress: return "no_progress";
        default: return "round_limit";
    }
}

inline LargeKStatus large_k_status_from_name(const std::string& s) {
    if (s == "reached") return LargeKStatus::reached;
    if (s == "no_progress") return LargeKStatus::no_progress;
    if (s == "round_limit") return LargeKStatus::round_limit;
    throw std::domain_error("certificate: unknown chain status '" + s + "'");
}

// ---------------------------------------------------------------------------
// Interval payload: exact endpoints plus the working precision, losslessly
// reconstructible because the endpoints are exactly representable at that
// precision.

inline certificate_json interval_to_json(const RealInterval& v) {
    certificate_json j;
    j["lo"] = q_to_string(v.lo_q());
    j["hi"] = q_to_string(v.hi_q());
    j["precision"] = static_cast<long>(v.precision());
    return j;
}

inline RealInterval interval_from_json(const certificate_json& j) {
    auto prec = static_cast<mpfr_prec_t>(j.at("precision").get<long>());
    mpq_class lo = q_from_string(j.at("lo").get<std::string>());
    mpq_class hi = q_from_string(j.at("hi").get<std::string>());
    mpfr_t l, h;
    mpfr_init2(l, prec);
    mpfr_init2(h, prec);
    mpfr_set_q(l, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(h, hi.get_mpq_t(), MPFR_RNDU);
    RealInterval out = RealInterval::from_endpoints(l, h, prec);
    mpfr_clear(l);
    mpfr_clear(h);
    return out;
}

// ---------------------------------------------------------------------------
// Root enclosure certificate.

inline certificate_json root_to_json(const RootCertificate& c) {
    certificate_json j;
    j["k"] = c.k;
    j["alpha"] = interval_to_json(c.alpha);
    j["precision_bits"] = c.precision_bits;
    j["sign_lo"] = c.sign_lo;
    j["sign_hi"] = c.sign_hi;
    return j;
}

inline RootCertificate root_from_json(const certificate_json& j) {
    RootCertificate c;
    c.k = j.at("k").get<int>();
    c.alpha = interval_from_json(j.at("alpha"));
    c.precision_bits = j.at("precision_bits").get<long>();
    c.sign_lo = j.at("sign_lo").get<int>();
    c.sign_hi = j.at("sign_hi").get<int>();
    return c;
}

// ---------------------------------------------------------------------------
// Reduction certificate (one lattice run, either pipeline).

inline certificate_json reduction_to_json(const ReductionCertificate& c) {
    certificate_json j;
    j["k"] = c.k;
    j["C"] = z_to_string(c.C);
    j["eta_floors"] = z_vec_to_strings(c.eta_floors);
    j["X"] = c.X;
    j["X0"] = c.X0;
    j["c1_sq"] = q_to_string(c.c1_sq);
    j["S"] = q_to_string(c.S);
    j["T"] = q_to_string(c.T);
    j["c3"] = c.c3;
    j["c4"] = c.c4;
    j["status"] = deweger_status_name(c.status);
    j["H_bound"] = c.H_bound;
    j["retries"] = c.retries;
    j["precision_bits"] = c.precision_bits;
    return j;
}

inline ReductionCertificate reduction_from_json(const certificate_json& j) {
    ReductionCertificate c;
    c.k = j.at("k").get<int>();
    c.C = z_from_string(j.at("C").get<std::string>());
    c.eta_floors = z_vec_from_strings(j.at("eta_floors").get<std::vector<std::string>>());
    c.X = j.at("X").get<std::vector<double>>();
    c.X0 = j.at("X0").get<double>();
    c.c1_sq = q_from_string(j.at("c1_sq").get<std::string>());
    c.S = q_from_string(j.at("S").get<std::string>());
    c.T = q_from_string(j.at("T").get<std::string>());
    c.c3 = j.at("c3").get<double>();
    c.c4 = j.at("c4").get<double>();
    c.status = deweger_status_from_name(j.at("status").get<std::string>());
    c.H_bound = j.at("H_bound").get<double>();
    c.retries = j.at("retries").get<int>();
    c.precision_bits = j.at("precision_bits").get<long>();
    return c;
}

// ---------------------------------------------------------------------------
// Per-order sweep of reduction certificates.

inline certificate_json small_k_sweep_to_json(const SmallKSweep& s) {
    certificate_json j;
    j["k_lo"] = s.k_lo;
    j["k_hi"] = s.k_hi;
    j["all_ok"] = s.all_ok;
    j["max_H"] = s.max_H;
    j["argmax_k"] = s.argmax_k;
    j["max_retries_used"] = s.max_retries_used;
    certificate_json arr = certificate_json::array();
    for (const ReductionCertificate& c : s.certificates) arr.push_back(reduction_to_json(c));
    j["certificates"] = std::move(arr);
    return j;
}

inline SmallKSweep small_k_sweep_from_json(const certificate_json& j) {
    SmallKSweep s;
    s.k_lo = j.at("k_lo").get<int>();
    s.k_hi = j.at("k_hi").get<int>();
    s.all_ok = j.at("all_ok").get<bool>();
    s.max_H = j.at("max_H").get<double>();
    s.argmax_k = j.at("argmax_k").get<int>();
    s.max_retries_used = j.at("max_retries_used").get<int>();
    for (const certificate_json& c : j.at("certificates"))
        s.certificates.push_back(reduction_from_json(c));
    return s;
}

// ---------------------------------------------------------------------------
// Iterated order-reduction chain.

inline certificate_json large_k_result_to_json(const LargeKResult& r) {
    certificate_json j;
    j["status"] = large_k_status_name(r.status);
    j["final_k_bound"] = r.final_k_bound;
    certificate_json arr = certificate_json::array();
    for (const LargeKRound& rd : r.rounds) {
        certificate_json rj;
        rj["k_bound_in"] = rd.k_bound_in;
        rj["n_bound_in"] = rd.n_bound_in;
        rj["certificate"] = reduction_to_json(rd.cert);
        rj["k_bound_out"] = rd.k_bound_out;
        rj["n_bound_out"] = rd.n_bound_out;
        arr.push_back(std::move(rj));
    }
    j["rounds"] = std::move(arr);
    return j;
}

inline LargeKResult large_k_result_from_json(const certificate_json& j) {
    LargeKResult r;
    r.status = large_k_status_from_name(j.at("status").get<std::string>());
    r.final_k_bound = j.at("final_k_bound").get<double>();
    for (const certificate_json& rj : j.at("rounds")) {
        LargeKRound rd;
        rd.k_bound_in = rj.at("k_bound_in").get<double>();
        rd.n_bound_in = rj.at("n_bound_in").get<double>();
        rd.cert = reduction_from_json(rj.at("certificate"));
        rd.k_bound_out = rj.at("k_bound_out").get<double>();
        rd.n_bound_out = rj.at("n_bound_out").get<double>();
        r.rounds.push_back(std::move(rd));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Search records and the sweep summary.

inline certificate_json solution_record_to_json(const SolutionRecord& r) {
    certificate_json j;
    j["k"] = r.k;
    j["n"] = r.n;
    j["value"] = z_to_string(r.value);
    j["exponents"] = {r.factorization.a, r.factorization.b, r.factorization.c,
                      r.factorization.d};
    j["remainder"] = z_to_string(r.factorization.remainder);
    return j;
}

inline SolutionRecord solution_record_from_json(const certificate_json& j) {
    SolutionRecord r;
    r.k = j.at("k").get<int>();
    r.n = j.at("n").get<long>();
    r.value = z_from_string(j.at("value").get<std::string>());
    auto e = j.at("exponents").get<std::vector<unsigned long>>();
    if (e.size() != 4) throw std::domain_error("certificate: exponents need 4 entries");
    r.factorization.a = e[0];
    r.factorization.b = e[1];
    r.factorization.c = e[2];
    r.factorization.d = e[3];
    r.factorization.remainder = z_from_string(j.at("remainder").get<std::string>());
    return r;
}

inline certificate_json search_sweep_to_json(int k_lo, int k_hi, long n_max,
                                             const std::vector<SolutionRecord>& records) {
    certificate_json j;
    j["k_lo"] = k_lo;
    j["k_hi"] = k_hi;
    j["n_max"] = n_max;
    j["count"] = records.size();
    certificate_json arr = certificate_json::array();
    for (const SolutionRecord& r : records) arr.push_back(solution_record_to_json(r));
    j["records"] = std::move(arr);
    return j;
}

inline std::vector<SolutionRecord> search_records_from_json(const certificate_json& j) {
    std::vector<SolutionRecord> out;
    for (const certificate_json& rj : j.at("records"))
        out.push_back(solution_record_from_json(rj));
    if (out.size() != j.at("count").get<std::size_t>())
        throw std::domain_error("certificate: record count mismatch");
    return out;
}

// ---------------------------------------------------------------------------
// Absolute-cap bound certificate.

inline certificate_json absolute_caps_to_json(const AbsoluteCaps& c) {
    certificate_json j;
    j["k_bound"] = c.k_bound;
    j["n_bound"] = c.n_bound;
    return j;
}

inline AbsoluteCaps absolute_caps_from_json(const certificate_json& j) {
    return AbsoluteCaps{j.at("k_bound").get<double>(), j.at("n_bound").get<double>()};
}

// ---------------------------------------------------------------------------
// Envelope: kind + provenance + inputs/outputs.

inline std::string iso8601_utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline certificate_json make_certificate(const std::string& kind, certificate_json inputs,
                                         certificate_json outputs) {
    if (kind != "root" && kind != "bound" && kind != "reduction" && kind != "sweep")
        throw std::domain_error("certificate: unknown kind '" + kind + "'");
    certificate_json j;
    j["kind"] = kind;
    j["tool"] = kToolName;
    j["tool_version"] = kToolVersion;
    j["timestamp"] = iso8601_utc_now();
    j["inputs"] = std::move(inputs);
    j["outputs"] = std::move(outputs);
    return j;
}

// Serialized form used everywhere a certificate is written or compared.
inline std::string certificate_text(const certificate_json& j) { return j.dump(2) + "\n"; }

inline void write_certificate_file(const std::filesystem::path& path,
                                   const certificate_json& cert) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("certificate: cannot write '" + path.string() + "'");
    out << certificate_text(cert);
    if (!out) throw std::runtime_error("certificate: write failed on '" + path.string() + "'");
}

inline certificate_json read_certificate_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("certificate: cannot read '" + path.string() + "'");
    return certificate_json::parse(in);
}

}  // namespace klucas
