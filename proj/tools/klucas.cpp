// Command-line surface for the k-generalized Lucas toolkit: sequence terms,
// certified dominant roots, lattice reduction pipelines, the seven-smooth
// search, invariant suites, and end-to-end certification.
//
// Exit codes: 0 all requested checks pass, 1 a mathematical check failed,
// 2 usage error, 3 resource exhausted (precision caps, unfactorable
// cofactors, unreadable files).

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "klucas/bounds.hpp"
#include "klucas/certificates.hpp"
#include "klucas/config.hpp"
#include "klucas/errors.hpp"
#include "klucas/numutil.hpp"
#include "klucas/pipelines.hpp"
#include "klucas/roots.hpp"
#include "klucas/sequence.hpp"
#include "klucas/smooth.hpp"
#include "klucas/verify.hpp"

namespace {

using namespace klucas;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct Options {
    PipelineConfig cfg;
    bool quiet = false;
    bool trace = false;
};

// "lo..hi" with either bound possibly negative.
std::pair<long, long> parse_range(const std::string& s) {
    auto dots = s.find("..");
    if (dots == std::string::npos)
        throw std::domain_error("range must look like lo..hi, got '" + s + "'");
    std::size_t used_lo = 0, used_hi = 0;
    long lo = 0, hi = 0;
    try {
        lo = std::stol(s.substr(0, dots), &used_lo);
        hi = std::stol(s.substr(dots + 2), &used_hi);
    } catch (const std::exception&) {
        throw std::domain_error("range must look like lo..hi, got '" + s + "'");
    }
    if (used_lo != dots || used_hi != s.size() - dots - 2)
        throw std::domain_error("range must look like lo..hi, got '" + s + "'");
    if (hi < lo) throw std::domain_error("empty range '" + s + "'");
    return {lo, hi};
}

// Sequence value as printed by `seq`: the library's domain floor is n = 2-k,
// and every index below it prints as 0, matching the all-zero seed tail.
mpz_class padded_term(const KParams& p, long n) {
    if (n < 2 - static_cast<long>(p.k)) return mpz_class(0);
    return term(p, n);
}

int cmd_seq(const Options&, int k, std::optional<long> n, std::optional<std::string> range) {
    KParams p(k);
    if (n.has_value() == range.has_value())
        throw std::domain_error("seq: exactly one of --n or --range is required");
    std::vector<mpz_class> values;
    if (n) {
        values.push_back(padded_term(p, *n));
    } else {
        auto [lo, hi] = parse_range(*range);
        const long floor_n = 2 - static_cast<long>(k);
        for (long i = lo; i < std::min(floor_n, hi + 1); ++i) values.emplace_back(0);
        if (hi >= floor_n) {
            TermStream st(p, std::max(lo, floor_n), hi);
            long idx;
            mpz_class v;
            while (st.next(idx, v)) values.push_back(v);
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i)
        std::cout << (i ? " " : "") << values[i].get_str();
    std::cout << "\n";
    return kExitOk;
}

// Decimal expansion of alpha(k), truncated to `digits` significant digits,
// certified by refining the enclosure until both exact endpoints share the
// same leading digit block.
std::string root_digits(const Options& opt, int k, int digits, RootCertificate& cert_out) {
    const mpz_class scale = pow10_z(static_cast<unsigned long>(digits - 1));
    long bits = 4L * digits + 64;
    for (;;) {
        RootCertificate cert = dominant_root(k, bits);
        mpz_class lo = floor_q(cert.alpha.lo_q() * scale);
        mpz_class hi = floor_q(cert.alpha.hi_q() * scale);
        if (lo == hi) {
            cert_out = cert;
            std::string s = lo.get_str();
            return digits == 1 ? s : s.substr(0, 1) + "." + s.substr(1);
        }
        if (bits >= kPrecisionCapBits)
            throw resource_error("root: digit certification exhausted the precision cap");
        if (opt.trace)
            std::cerr << "trace: k=" << k << " digits straddle a boundary at " << bits
                      << " bits, escalating\n";
        bits = std::min(2 * bits, kPrecisionCapBits);
    }
}

int cmd_root(const Options& opt, int k, int digits, const std::string& out_path) {
    if (k < 2) throw std::domain_error("root: k must be >= 2");
    if (digits < 1 || digits > 100000) throw std::domain_error("root: digits must be in [1, 100000]");
    RootCertificate cert;
    std::string decimal = root_digits(opt, k, digits, cert);
    std::cout << decimal << "\n";
    if (!out_path.empty()) {
        certificate_json outputs = root_to_json(cert);
        outputs["decimal"] = decimal;
        write_certificate_file(
            out_path, make_certificate("root", {{"k", k}, {"digits", digits}}, outputs));
        if (!opt.quiet) std::cerr << "certificate written to " << out_path << "\n";
    }
    return kExitOk;
}

std::string smooth_product(const SmoothFactorization& f) {
    std::string out;
    auto add = [&out](unsigned long p, unsigned long e) {
        if (e == 0) return;
        if (!out.empty()) out += " * ";
        out += std::to_string(p) + "^" + std::to_string(e);
    };
    add(2, f.a);
    add(3, f.b);
    add(5, f.c);
    add(7, f.d);
    return out.empty() ? "1" : out;
}

void trace_reduction(const Options& opt, const ReductionCertificate& c) {
    if (!opt.trace) return;
    std::cerr << "trace: k=" << c.k << " status=" << deweger_status_name(c.status)
              << " retries=" << c.retries << " precision_bits=" << c.precision_bits
              << " H=" << c.H_bound << "\n";
}

int cmd_reduce_small_single(const Options& opt, int k, int retries, long scale_exp,
                            const std::string& out_path) {
    ReductionCertificate cert = reduce_small_k_case(
        k, seven_smooth_index_bound(static_cast<double>(k)),
        pow10_z(static_cast<unsigned long>(scale_exp)), retries);
    trace_reduction(opt, cert);
    bool ok = cert.status == DewegerStatus::ok;
    std::cout << "k=" << k << ": " << deweger_status_name(cert.status);
    if (ok) std::cout << ", n-1 <= " << static_cast<long>(cert.H_bound);
    std::cout << " (retries=" << cert.retries << ")\n";
    if (!out_path.empty()) {
        write_certificate_file(out_path,
                               make_certificate("reduction",
                                                {{"case", "small-k"},
                                                 {"k", k},
                                                 {"scale_exponent", scale_exp},
                                                 {"retry_limit", retries}},
                                                reduction_to_json(cert)));
        if (!opt.quiet) std::cerr << "certificate written to " << out_path << "\n";
    }
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_reduce_small_sweep(const Options& opt, int k_lo, int k_hi, const std::string& out_path) {
    SmallKSweep sweep = reduce_small_k_sweep(k_lo, k_hi, opt.cfg.workers);
    long ok_count = 0;
    std::vector<int> failed;
    for (const ReductionCertificate& c : sweep.certificates) {
        trace_reduction(opt, c);
        if (c.status == DewegerStatus::ok)
            ++ok_count;
        else
            failed.push_back(c.k);
    }
    std::cout << "small-k sweep over k in [" << k_lo << ", " << k_hi << "]: " << ok_count << "/"
              << sweep.certificates.size() << " orders reduced\n";
    if (ok_count > 0)
        std::cout << "max n-1 bound among reduced orders: " << static_cast<long>(sweep.max_H)
                  << " (at k=" << sweep.argmax_k << ", worst retries=" << sweep.max_retries_used
                  << ")\n";
    if (!failed.empty()) {
        std::cout << "orders failing the lattice distance hypothesis (" << failed.size() << "):";
        for (std::size_t i = 0; i < failed.size() && i < 12; ++i) std::cout << " " << failed[i];
        if (failed.size() > 12) std::cout << " ...";
        std::cout << "\n";
    }
    if (!out_path.empty()) {
        write_certificate_file(
            out_path, make_certificate("sweep", {{"case", "small-k"}, {"k_lo", k_lo}, {"k_hi", k_hi}},
                                       small_k_sweep_to_json(sweep)));
        if (!opt.quiet) std::cerr << "certificate written to " << out_path << "\n";
    }
    return sweep.all_ok ? kExitOk : kExitCheckFailed;
}

int cmd_reduce_large(const Options& opt, double k_bound, double n_bound, int rounds, int margin,
                     const std::string& out_path) {
    LargeKResult res = reduce_large_k_case(k_bound, n_bound, rounds, margin);
    for (std::size_t i = 0; i < res.rounds.size(); ++i) {
        const LargeKRound& r = res.rounds[i];
        trace_reduction(opt, r.cert);
        if (!opt.quiet)
            std::cout << "round " << (i + 1) << ": k <= " << r.k_bound_in << " -> k <= "
                      << r.k_bound_out << " (H=" << r.cert.H_bound << ")\n";
    }
    std::cout << "large-k chain: status=" << large_k_status_name(res.status)
              << ", final k bound " << res.final_k_bound << " after " << res.rounds.size()
              << " round(s)\n";
    if (!out_path.empty()) {
        write_certificate_file(out_path,
                               make_certificate("reduction",
                                                {{"case", "large-k"},
                                                 {"k_bound", k_bound},
                                                 {"n_bound", n_bound},
                                                 {"round_limit", rounds},
                                                 {"margin_cap", margin}},
                                                large_k_result_to_json(res)));
        if (!opt.quiet) std::cerr << "certificate written to " << out_path << "\n";
    }
    return res.status == LargeKStatus::reached ? kExitOk : kExitCheckFailed;
}

int cmd_search(const Options& opt, const std::string& k_range, long n_max,
               const std::string& checkpoint, bool resume, const std::string& out_path) {
    auto [k_lo_l, k_hi_l] = parse_range(k_range);
    if (k_lo_l < 2) throw std::domain_error("search: k range must start at 2 or above");
    int k_lo = static_cast<int>(k_lo_l), k_hi = static_cast<int>(k_hi_l);
    auto n_hi_fn = [n_max](int) { return n_max; };

    std::vector<SolutionRecord> records;
    if (checkpoint.empty()) {
        records = search(k_lo, k_hi, n_hi_fn, opt.cfg.workers);
    } else {
        std::error_code ec;
        auto size = std::filesystem::file_size(checkpoint, ec);
        if (!ec && size > 0 && !resume)
            throw std::domain_error("search: checkpoint '" + checkpoint +
                                    "' already has entries; pass --resume to reuse it");
        CheckpointedSearch cs = search_checkpointed(k_lo, k_hi, n_hi_fn, checkpoint,
                                                    opt.cfg.workers);
        if (opt.trace)
            std::cerr << "trace: checkpoint restored " << cs.shards_restored
                      << " shard(s), ran " << cs.shards_run << "\n";
        records = std::move(cs.records);
    }

    if (!opt.quiet)
        std::cout << "note: terms with n <= k equal 3*2^(n-2) (or the seeds 2, 1) and are "
                     "seven-smooth by construction; the search covers n >= k+1\n";
    for (const SolutionRecord& r : records)
        std::cout << "k=" << r.k << " n=" << r.n << " L=" << r.value.get_str() << " = "
                  << smooth_product(r.factorization) << "\n";
    std::cout << records.size() << " seven-smooth term(s) with k in [" << k_lo << ", " << k_hi
              << "], k+1 <= n <= " << n_max << "\n";
    if (!out_path.empty()) {
        write_certificate_file(
            out_path,
            make_certificate("sweep",
                             {{"case", "search"},
                              {"k_lo", k_lo},
                              {"k_hi", k_hi},
                              {"n_max", n_max}},
                             search_sweep_to_json(k_lo, k_hi, n_max, records)));
        if (!opt.quiet) std::cerr << "certificate written to " << out_path << "\n";
    }
    return kExitOk;
}

int report_suites(const std::vector<SuiteReport>& reports) {
    bool all = true;
    for (const SuiteReport& r : reports) {
        std::cout << r.name << ": " << (r.pass ? "pass" : "FAIL") << " (" << r.checks
                  << " checks) - " << r.detail << "\n";
        all = all && r.pass;
    }
    return all ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const Options& opt, const std::string& suite, int k_max,
               const std::string& k_range, long n_max) {
    auto range = [&k_range](int def_lo, int def_hi) {
        if (k_range.empty()) return std::pair<long, long>{def_lo, def_hi};
        return parse_range(k_range);
    };
    const int workers = opt.cfg.workers;
    std::vector<SuiteReport> reports;
    auto want = [&suite](const char* name) { return suite == "all" || suite == name; };
    if (want("identities")) reports.push_back(run_identities_suite(k_max > 0 ? k_max : 50, workers));
    if (want("binet")) {
        auto [lo, hi] = range(2, 20);
        reports.push_back(run_binet_suite(static_cast<int>(lo), static_cast<int>(hi),
                                          n_max > 0 ? n_max : 200, workers));
    }
    if (want("roots")) reports.push_back(run_roots_suite(k_max > 0 ? k_max : 100, workers));
    if (want("f-range")) reports.push_back(run_f_range_suite(k_max > 0 ? k_max : 100, workers));
    if (want("proximity")) reports.push_back(run_proximity_suite());
    if (want("t11")) {
        auto [lo, hi] = range(2, 10);
        reports.push_back(run_t11_suite(static_cast<int>(lo), static_cast<int>(hi),
                                        n_max > 0 ? n_max : 100, workers));
    }
    if (want("guz")) reports.push_back(run_guz_suite());
    if (reports.empty())
        throw std::domain_error(
            "verify: unknown suite '" + suite +
            "' (expected identities|binet|roots|f-range|proximity|t11|guz|all)");
    return report_suites(reports);
}

int cmd_certify(const Options& opt, const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    bool all_ok = true;

    AbsoluteCaps caps = seven_smooth_absolute_bounds();
    write_certificate_file(dir / "bound_caps.json",
                           make_certificate("bound", certificate_json::object(),
                                            absolute_caps_to_json(caps)));
    std::cout << "[1/4] absolute caps: k <= " << caps.k_bound << ", n <= " << caps.n_bound
              << "\n";

    int rc_large = cmd_reduce_large(opt, caps.k_bound, caps.n_bound, opt.cfg.round_limit,
                                    opt.cfg.margin_cap,
                                    (dir / "reduction_large_k.json").string());
    std::cout << "[2/4] iterated order reduction: "
              << (rc_large == kExitOk ? "ok" : "FAILED to reach k < 1000") << "\n";
    all_ok = all_ok && rc_large == kExitOk;

    int rc_small = cmd_reduce_small_sweep(opt, opt.cfg.k_lo, opt.cfg.k_hi,
                                          (dir / "sweep_small_k.json").string());
    std::cout << "[3/4] per-order index reduction: "
              << (rc_small == kExitOk ? "ok" : "FAILED on some orders") << "\n";
    all_ok = all_ok && rc_small == kExitOk;

    int rc_search = cmd_search(opt, std::to_string(opt.cfg.k_lo) + ".." +
                                        std::to_string(opt.cfg.k_hi),
                               opt.cfg.n_max, opt.cfg.checkpoint_path, true,
                               (dir / "sweep_search.json").string());
    std::cout << "[4/4] seven-smooth search: " << (rc_search == kExitOk ? "ok" : "FAILED")
              << "\n";
    all_ok = all_ok && rc_search == kExitOk;

    std::cout << "certify: " << (all_ok ? "PASS" : "FAIL") << "\n";
    return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-generalized Lucas toolkit: sequence terms, certified dominant roots, "
                 "lattice reduction pipelines, and the seven-smooth search"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.set_version_flag("--version", std::string(kToolVersion));

    Options opt;
    std::string config_path;
    int workers_flag = 0;
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--workers", workers_flag, "worker threads (default: logical cores)");
    app.add_flag("--quiet", opt.quiet, "suppress informational notes");
    app.add_flag("--trace", opt.trace, "log precision escalations and retry events");

    std::function<int()> action;

    auto* seq = app.add_subcommand("seq", "print sequence terms");
    {
        auto k = std::make_shared<int>(0);
        auto n = std::make_shared<long>(0);
        auto range = std::make_shared<std::string>();
        seq->add_option("--k", *k, "recurrence order (>= 2)")->required();
        auto* on = seq->add_option("--n", *n, "single index");
        auto* orange = seq->add_option("--range", *range, "inclusive index range lo..hi");
        on->excludes(orange);
        orange->excludes(on);
        seq->callback([&, k, n, range, on, orange] {
            action = [&, k, n, range,
                      has_n = on->count() > 0, has_r = orange->count() > 0] {
                return cmd_seq(opt, *k,
                               has_n ? std::optional<long>(*n) : std::nullopt,
                               has_r ? std::optional<std::string>(*range) : std::nullopt);
            };
        });
    }

    auto* root = app.add_subcommand("root", "print the certified dominant root");
    {
        auto k = std::make_shared<int>(0);
        auto digits = std::make_shared<int>(30);
        auto out = std::make_shared<std::string>();
        root->add_option("--k", *k, "recurrence order (>= 2)")->required();
        root->add_option("--digits", *digits, "significant digits (truncated), default 30");
        root->add_option("--out", *out, "write a root certificate to this file");
        root->callback([&, k, digits, out] {
            action = [&, k, digits, out] { return cmd_root(opt, *k, *digits, *out); };
        });
    }

    auto* reduce = app.add_subcommand("reduce", "run a lattice reduction pipeline");
    {
        auto case_name = std::make_shared<std::string>();
        auto k = std::make_shared<int>(0);
        auto k_lo = std::make_shared<int>(0);
        auto k_hi = std::make_shared<int>(0);
        auto retries = std::make_shared<int>(-1);
        auto scale_exp = std::make_shared<long>(355);
        auto rounds = std::make_shared<int>(-1);
        auto margin = std::make_shared<int>(-1);
        auto k_bound = std::make_shared<double>(0.0);
        auto n_bound = std::make_shared<double>(0.0);
        auto out = std::make_shared<std::string>();
        reduce->add_option("--case", *case_name, "small-k or large-k")
            ->required()
            ->check(CLI::IsMember({"small-k", "large-k"}));
        reduce->add_option("--k", *k, "single order (small-k only)");
        reduce->add_option("--k-lo", *k_lo, "sweep start (small-k, default from config)");
        reduce->add_option("--k-hi", *k_hi, "sweep end (small-k, default from config)");
        reduce->add_option("--retries", *retries, "scale retries (small-k)");
        reduce->add_option("--scale-exponent", *scale_exp, "C = 10^e starting scale (small-k)");
        reduce->add_option("--rounds", *rounds, "round limit (large-k)");
        reduce->add_option("--margin", *margin, "scale margin cap (large-k)");
        reduce->add_option("--k-bound", *k_bound, "starting order bound (large-k)");
        reduce->add_option("--n-bound", *n_bound, "starting index bound (large-k)");
        reduce->add_option("--out", *out, "write the certificate to this file");
        reduce->callback([&, case_name, k, k_lo, k_hi, retries, scale_exp, rounds, margin,
                          k_bound, n_bound, out] {
            action = [&, case_name, k, k_lo, k_hi, retries, scale_exp, rounds, margin, k_bound,
                      n_bound, out] {
                if (*case_name == "small-k") {
                    int r = *retries >= 0 ? *retries : opt.cfg.retry_limit;
                    if (*k > 0) return cmd_reduce_small_single(opt, *k, r, *scale_exp, *out);
                    int lo = *k_lo > 0 ? *k_lo : opt.cfg.k_lo;
                    int hi = *k_hi > 0 ? *k_hi : opt.cfg.k_hi;
                    return cmd_reduce_small_sweep(opt, lo, hi, *out);
                }
                AbsoluteCaps caps = seven_smooth_absolute_bounds();
                double kb = *k_bound > 0 ? *k_bound : caps.k_bound;
                double nb = *n_bound > 0 ? *n_bound
                                         : (*k_bound > 0 ? seven_smooth_index_bound(kb)
                                                         : caps.n_bound);
                return cmd_reduce_large(opt, kb, nb,
                                        *rounds > 0 ? *rounds : opt.cfg.round_limit,
                                        *margin > 0 ? *margin : opt.cfg.margin_cap, *out);
            };
        });
    }

    auto* search_cmd = app.add_subcommand("search", "enumerate seven-smooth terms");
    {
        auto k_range = std::make_shared<std::string>();
        auto n_max = std::make_shared<long>(0);
        auto checkpoint = std::make_shared<std::string>();
        auto resume = std::make_shared<bool>(false);
        auto out = std::make_shared<std::string>();
        search_cmd->add_option("--k", *k_range, "order range lo..hi (default from config)");
        search_cmd->add_option("--n-max", *n_max, "index ceiling (default from config)");
        search_cmd->add_option("--checkpoint", *checkpoint, "journal file for restartable runs");
        search_cmd->add_flag("--resume", *resume, "reuse an existing nonempty checkpoint");
        search_cmd->add_option("--out", *out, "write the sweep certificate to this file");
        search_cmd->callback([&, k_range, n_max, checkpoint, resume, out] {
            action = [&, k_range, n_max, checkpoint, resume, out] {
                std::string kr = k_range->empty() ? std::to_string(opt.cfg.k_lo) + ".." +
                                                        std::to_string(opt.cfg.k_hi)
                                                  : *k_range;
                std::string ck = checkpoint->empty() ? opt.cfg.checkpoint_path : *checkpoint;
                return cmd_search(opt, kr, *n_max > 0 ? *n_max : opt.cfg.n_max, ck, *resume,
                                  *out);
            };
        });
    }

    auto* verify = app.add_subcommand("verify", "run an invariant suite");
    {
        auto suite = std::make_shared<std::string>();
        auto k_max = std::make_shared<int>(0);
        auto k_range = std::make_shared<std::string>();
        auto n_max = std::make_shared<long>(0);
        verify->add_option("suite", *suite,
                           "identities|binet|roots|f-range|proximity|t11|guz|all")
            ->required();
        verify->add_option("--k-max", *k_max, "order ceiling (identities/roots/f-range)");
        verify->add_option("--k", *k_range, "order range lo..hi (binet/t11)");
        verify->add_option("--n-max", *n_max, "index ceiling (binet/t11)");
        verify->callback([&, suite, k_max, k_range, n_max] {
            action = [&, suite, k_max, k_range, n_max] {
                return cmd_verify(opt, *suite, *k_max, *k_range, *n_max);
            };
        });
    }

    auto* certify = app.add_subcommand("certify", "run both pipelines and the search end-to-end");
    {
        auto out_dir = std::make_shared<std::string>();
        certify->add_option("--out-dir", *out_dir, "certificate directory (default from config)");
        certify->callback([&, out_dir] {
            action = [&, out_dir] {
                return cmd_certify(opt, out_dir->empty() ? opt.cfg.output_dir : *out_dir);
            };
        });
    }

    try {
        app.parse(argc, argv);
        opt.cfg = resolved_config();
        if (!config_path.empty()) load_config_file(opt.cfg, config_path);
        if (workers_flag > 0) opt.cfg.workers = workers_flag;
        opt.cfg.validate();
        return action();
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const divergence_error& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}
