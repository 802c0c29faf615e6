// rsdverify: exhaustive axiomatic verification for random house allocation.
//
// Subcommands: verify, rsd, classify, certify, check-axioms, enumerate.
// Data goes to stdout or --out; progress and diagnostics go to stderr.

#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "housealloc/axioms.hpp"
#include "housealloc/efficiency.hpp"
#include "housealloc/mechanisms.hpp"
#include "housealloc/prefs.hpp"
#include "housealloc/verifier.hpp"

namespace {

using namespace housealloc;

constexpr int kExitUnderdetermined = 2;
constexpr int kExitInfeasibleOrDiffers = 3;
constexpr int kExitIo = 10;
constexpr int kExitParse = 11;

// deterministic seedable generator (splitmix64) with unbiased bounded draw
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }
};

Profile random_profile(Rng& rng, int n, int m, const std::vector<Ranking>& rks) {
    std::vector<Ranking> v;
    v.reserve(n);
    for (int i = 0; i < n; ++i) v.push_back(rks[rng.below(rks.size())]);
    return Profile(std::move(v));
}

bool write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return static_cast<bool>(std::cout);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) return false;
    f << content;
    return static_cast<bool>(f);
}

std::string matrix_json(const AssignmentMatrix& M) {
    nlohmann::ordered_json j;
    j["n"] = M.agents();
    j["m"] = M.houses();
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : M.entries()) entries.push_back(e.to_string());
    j["entries"] = std::move(entries);
    return j.dump();
}

std::string matrix_csv(const AssignmentMatrix& M) {
    std::ostringstream os;
    for (int i = 0; i < M.agents(); ++i) {
        for (House h = 0; h < M.houses(); ++h) {
            if (h) os << ',';
            os << M.at(i, h).to_string();
        }
        os << '\n';
    }
    return os.str();
}

std::string matrix_pretty(const AssignmentMatrix& M) {
    std::vector<std::vector<std::string>> cells(M.agents());
    size_t w = 1;
    for (int i = 0; i < M.agents(); ++i) {
        for (House h = 0; h < M.houses(); ++h) {
            cells[i].push_back(M.at(i, h).to_string());
            w = std::max(w, cells[i].back().size());
        }
    }
    std::ostringstream os;
    os << "agent";
    for (House h = 0; h < M.houses(); ++h)
        os << ' ' << std::string(w - 1, ' ') << house_letter(h);
    os << '\n';
    for (int i = 0; i < M.agents(); ++i) {
        os << "  " << (i + 1) << "  ";
        for (House h = 0; h < M.houses(); ++h)
            os << ' ' << std::string(w - cells[i][h].size(), ' ') << cells[i][h];
        os << '\n';
    }
    return os.str();
}

int cmd_verify(int n, int m, const std::string& out_path, const std::string& summary_path,
               int threads, bool quiet) {
    VerifyOptions opts;
    opts.threads = threads;
    if (!quiet) opts.progress = [](const std::string& s) { std::cerr << s << '\n'; };
    VerificationReport report;
    try {
        report = verify_theorem(n, m, opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 1;
    }
    if (!write_output(out_path, report.to_jsonl())) {
        std::cerr << "cannot write report to '" << out_path << "'\n";
        return kExitIo;
    }
    if (!summary_path.empty() && !write_output(summary_path, report.summary_csv())) {
        std::cerr << "cannot write summary to '" << summary_path << "'\n";
        return kExitIo;
    }
    std::cerr << "profiles: " << report.total_profiles << " in " << report.records.size()
              << " canonical orbits; UniqueEqualsRSD " << report.count_unique_equals_rsd
              << ", UniqueDiffersFromRSD " << report.count_unique_differs
              << ", Underdetermined " << report.count_underdetermined << ", Infeasible "
              << report.count_infeasible << "; rounds " << report.max_round << '\n';
    if (report.count_infeasible > 0 || report.count_unique_differs > 0)
        return kExitInfeasibleOrDiffers;
    if (report.count_underdetermined > 0) return kExitUnderdetermined;
    return 0;
}

int cmd_rsd(const std::string& profile, const std::string& format) {
    Profile p;
    try {
        p = parse_profile(profile);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitParse;
    }
    AssignmentMatrix M = rsd(p);
    if (format == "json")
        std::cout << matrix_json(M) << '\n';
    else if (format == "csv")
        std::cout << matrix_csv(M);
    else
        std::cout << matrix_pretty(M);
    return 0;
}

int cmd_classify(const std::string& profile, const std::string& format) {
    Profile p;
    try {
        p = parse_profile(profile);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitParse;
    }
    const int n = p.agents();
    const auto analysis = analyze_efficiency(p);
    const int d = disagreement_parameter(p);
    const bool nu = is_near_unanimous(p);
    const bool dg = is_degenerate(p);
    std::vector<bool> agent_supported;
    std::vector<std::vector<std::pair<HousePair, int>>> violations;
    bool profile_supported = false;
    if (n == 4) {
        for (int i = 0; i < 4; ++i) {
            agent_supported.push_back(is_supported_agent(p, i));
            violations.push_back(support_violations(p, i));
        }
        profile_supported = is_supported_profile(p);
    }
    std::vector<Cell> zeros;
    for (int i = 0; i < n; ++i)
        for (House h = 0; h < p.houses(); ++h)
            if (analysis.forced_zero[i][h]) zeros.push_back({i, h});

    if (format == "json") {
        nlohmann::ordered_json j;
        j["profile"] = p.to_string();
        j["D"] = d;
        j["near_unanimous"] = nu;
        j["degenerate"] = dg;
        if (n == 4) {
            j["supported"] = profile_supported;
            auto agents = nlohmann::ordered_json::array();
            for (int i = 0; i < 4; ++i) {
                nlohmann::ordered_json a;
                a["agent"] = i + 1;
                a["supported"] = static_cast<bool>(agent_supported[i]);
                auto viol = nlohmann::ordered_json::array();
                for (const auto& [pr, cnt] : violations[i]) {
                    nlohmann::ordered_json v;
                    v["pair"] = std::string{house_letter(pr.first), house_letter(pr.second)};
                    v["agreers"] = cnt;
                    viol.push_back(std::move(v));
                }
                a["violated_pairs"] = std::move(viol);
                agents.push_back(std::move(a));
            }
            j["agents"] = std::move(agents);
        } else {
            j["supported"] = nullptr;
        }
        auto fz = nlohmann::ordered_json::array();
        for (const auto& c : zeros) {
            nlohmann::ordered_json z;
            z["agent"] = c.agent + 1;
            z["house"] = std::string(1, house_letter(c.house));
            fz.push_back(std::move(z));
        }
        j["forced_zeros"] = std::move(fz);
        std::cout << j.dump() << '\n';
        return 0;
    }
    std::cout << "profile: " << p.to_string() << '\n';
    std::cout << "D: " << d << '\n';
    std::cout << "near-unanimous: " << (nu ? "true" : "false") << '\n';
    std::cout << "degenerate: " << (dg ? "true" : "false") << '\n';
    if (n == 4) {
        std::cout << "supported profile: " << (profile_supported ? "true" : "false") << '\n';
        for (int i = 0; i < 4; ++i) {
            std::cout << "agent " << (i + 1) << ": "
                      << (agent_supported[i] ? "supported" : "NOT supported");
            if (!violations[i].empty()) {
                std::cout << "; pairs short of two agreers:";
                for (const auto& [pr, cnt] : violations[i])
                    std::cout << " {" << house_letter(pr.first) << ',' << house_letter(pr.second)
                              << "} agree=" << cnt;
            }
            std::cout << '\n';
        }
    }
    std::cout << "forced zeros:";
    for (const auto& c : zeros)
        std::cout << " (" << (c.agent + 1) << ',' << house_letter(c.house) << ')';
    std::cout << '\n';
    return 0;
}

int cmd_certify(const std::string& profile, const std::string& out_path, int threads,
                bool quiet) {
    Profile p;
    try {
        p = parse_profile(profile);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitParse;
    }
    VerifyOptions opts;
    opts.threads = threads;
    if (!quiet) opts.progress = [](const std::string& s) { std::cerr << s << '\n'; };
    VerificationReport report;
    try {
        report = verify_theorem(p.agents(), p.houses(), opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 1;
    }
    if (!report.db->determined(p)) {
        std::cerr << "profile not determined by the axioms\n";
        return kExitUnderdetermined;
    }
    DeterminationCertificate cert = certify(p, *report.db);
    std::string diag;
    if (!replay_certificate(cert, *report.db, &diag)) {
        std::cerr << "internal error: certificate replay failed: " << diag << '\n';
        return kExitInfeasibleOrDiffers;
    }
    // reuse the report serializer by locating the canonical record
    nlohmann::ordered_json j;
    j["profile"] = p.to_string();
    auto steps = nlohmann::ordered_json::array();
    for (const auto& s : cert.steps) {
        nlohmann::ordered_json js;
        js["agent"] = s.cell.agent + 1;
        js["house"] = std::string(1, house_letter(s.cell.house));
        js["reason"] = reason_name(s.reason);
        if (s.reason == CertificateStep::Reason::Eta) js["id"] = s.eta_id;
        if (s.reason == CertificateStep::Reason::SpImport) {
            js["source"] = s.import_from->source.to_string();
            js["swap_agent"] = s.import_from->swap.agent + 1;
            js["swap_pos"] = s.import_from->swap.position;
            js["source_D"] = s.source_level;
        }
        if (s.reason == CertificateStep::Reason::SolvedJointly) js["system"] = s.system_id;
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    j["matrix"] = nlohmann::ordered_json::parse(matrix_json(cert.final_matrix));
    if (!write_output(out_path, j.dump() + "\n")) {
        std::cerr << "cannot write certificate to '" << out_path << "'\n";
        return kExitIo;
    }
    return 0;
}

int cmd_check_axioms(int n, int m, bool exhaustive, std::uint64_t samples,
                     std::uint64_t seed) {
    if (!exhaustive && samples == 0) {
        std::cerr << "refused: sample count must be positive\n";
        return 1;
    }
    const Mechanism mech = [](const Profile& p) { return rsd(p); };
    std::uint64_t n_expe = 0, n_eta = 0, n_sp = 0;
    bool ok = true;
    auto run_profile = [&](const Profile& p) {
        if (!check_expe(mech, p)) {
            std::cerr << "ExPE fails at " << p.to_string() << '\n';
            ok = false;
        }
        ++n_expe;
        if (!check_eta(mech, p)) {
            std::cerr << "ETA fails at " << p.to_string() << '\n';
            ok = false;
        }
        ++n_eta;
        for (int i = 0; i < p.agents(); ++i) {
            for (int k = 0; k + 1 < p.houses(); ++k) {
                if (!check_sp(mech, p, {i, k})) {
                    std::cerr << "SP fails at " << p.to_string() << " agent " << (i + 1)
                              << " pos " << k << '\n';
                    ok = false;
                }
                ++n_sp;
            }
        }
    };
    try {
        if (exhaustive) {
            enumerate_profiles(n, m, run_profile);
        } else {
            auto rks = enumerate_rankings(m);
            Rng rng(seed);
            for (std::uint64_t s = 0; s < samples; ++s)
                run_profile(random_profile(rng, n, m, rks));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 1;
    }
    std::cout << "expe_checks=" << n_expe << " eta_checks=" << n_eta
              << " sp_checks=" << n_sp << " result=" << (ok ? "pass" : "fail") << '\n';
    return ok ? 0 : 1;
}

int cmd_enumerate(int n, int m, bool canonical_only) {
    try {
        if (!canonical_only) {
            enumerate_profiles(n, m, [](const Profile& p) { std::cout << p.to_string() << '\n'; });
            return 0;
        }
        // orbit marking: the first unmarked profile in lexicographic order is
        // its orbit's representative; mark the whole orbit and move on
        auto agent_perms = all_permutations(n);
        auto house_perms = all_permutations(m);
        std::unordered_set<std::string> marked;
        std::uint64_t count = 0;
        enumerate_profiles(n, m, [&](const Profile& p) {
            auto it = marked.find(p.to_string());
            if (it != marked.end()) {
                marked.erase(it);  // each orbit member is visited exactly once
                return;
            }
            std::uint64_t orbit = 1;
            for (const auto& sigma : agent_perms)
                for (const auto& pi : house_perms) {
                    std::string s = rename(p, sigma, pi).to_string();
                    if (s != p.to_string() && marked.insert(std::move(s)).second) ++orbit;
                }
            std::cout << p.to_string() << ',' << orbit << '\n';
            ++count;
        });
        std::cerr << "canonical representatives: " << count << '\n';
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Axiomatic verification engine for random house allocation"};
    app.require_subcommand(1);

    int n = 4, m = 4, threads = 0;
    std::string profile, out_path, summary_path, format = "pretty";
    bool quiet = false, exhaustive = false, canonical_only = false;
    std::uint64_t samples = 1000, seed = 1;

    auto* verify = app.add_subcommand("verify", "verify the axiomatic characterization");
    verify->add_option("--n", n, "number of agents")->required();
    verify->add_option("--m", m, "number of houses")->required();
    verify->add_option("--out", out_path, "report file (JSON lines); stdout when omitted");
    verify->add_option("--summary", summary_path, "per-level summary CSV file");
    verify->add_option("--threads", threads, "worker threads (0 = auto)");
    verify->add_flag("--quiet", quiet, "suppress progress output");

    auto* rsd_cmd = app.add_subcommand("rsd", "print the random serial dictatorship matrix");
    rsd_cmd->add_option("--profile", profile, "profile, e.g. abcd|abdc|acbd|bacd")->required();
    rsd_cmd->add_option("--format", format, "json | csv | pretty");

    auto* classify = app.add_subcommand("classify", "print structural predicates of a profile");
    classify->add_option("--profile", profile)->required();
    classify->add_option("--format", format, "json | pretty");

    auto* certify_cmd =
        app.add_subcommand("certify", "emit the determination certificate of a profile");
    certify_cmd->add_option("--profile", profile)->required();
    certify_cmd->add_option("--out", out_path, "output file; stdout when omitted");
    certify_cmd->add_option("--threads", threads, "worker threads (0 = auto)");
    certify_cmd->add_flag("--quiet", quiet, "suppress progress output");

    auto* check = app.add_subcommand("check-axioms", "check that RSD satisfies the axioms");
    check->add_option("--n", n)->required();
    check->add_option("--m", m)->required();
    check->add_flag("--exhaustive", exhaustive, "check every profile");
    check->add_option("--samples", samples, "number of sampled profiles");
    check->add_option("--seed", seed, "sampling seed");

    auto* enumerate = app.add_subcommand("enumerate", "list profiles");
    enumerate->add_option("--n", n)->required();
    enumerate->add_option("--m", m)->required();
    enumerate->add_flag("--canonical", canonical_only, "only canonical representatives");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cmd_verify(n, m, out_path, summary_path, threads, quiet);
        if (rsd_cmd->parsed()) return cmd_rsd(profile, format);
        if (classify->parsed()) return cmd_classify(profile, format);
        if (certify_cmd->parsed()) return cmd_certify(profile, out_path, threads, quiet);
        if (check->parsed()) return cmd_check_axioms(n, m, exhaustive, samples, seed);
        if (enumerate->parsed()) return cmd_enumerate(n, m, canonical_only);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
