#pragma once

#include <algorithm>
#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pvfree/errors.hpp"
#include "pvfree/fields.hpp"
#include "pvfree/free_energy.hpp"
#include "pvfree/io.hpp"
#include "pvfree/multipliers.hpp"
#include "pvfree/pv_scheme.hpp"
#include "pvfree/verify.hpp"

namespace pvfree {

struct CommandOutcome {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    std::string summary;
};

namespace detail {

inline PauliVillarsScheme load_scheme(const std::string& path) {
    return path.empty() ? scheme_from_masses(1.0, 2.0, 3.0) : scheme_from_json(read_file(path));
}

}  // namespace detail

/// Parses and runs one command. Exit codes: 0 success, 1 verification failure,
/// 2 usage error, 3 runtime or numeric error.
inline CommandOutcome execute_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pauli-Villars free energy multipliers and verification", "pvfree"};
    app.require_subcommand(1);

    double m0 = 1.0, m1 = 0.0, m2 = 0.0, cutoff = 0.0, ratio = 2.0;
    std::string json_path;
    auto* scheme_cmd = app.add_subcommand("scheme", "Build a Pauli-Villars scheme");
    scheme_cmd->add_option("--m0", m0, "Physical mass")->required();
    auto* o_m1 = scheme_cmd->add_option("--m1", m1, "First auxiliary mass");
    auto* o_m2 = scheme_cmd->add_option("--m2", m2, "Second auxiliary mass");
    auto* o_cut = scheme_cmd->add_option("--cutoff", cutoff, "Target averaged cutoff");
    scheme_cmd->add_option("--ratio", ratio, "m2/m1 when solving for a cutoff")->capture_default_str();
    scheme_cmd->add_option("--json", json_path, "Write the scheme as JSON");
    o_m1->needs(o_m2);
    o_m2->needs(o_m1);
    o_cut->excludes(o_m1)->excludes(o_m2);

    std::string quantity = "all", scheme_file, out_path;
    double beta = 1.0, k_min = 0.0, k_max = 10.0;
    std::size_t samples = 101;
    bool log_k = false;
    auto* table_cmd = app.add_subcommand("table", "Tabulate multipliers over |k|");
    table_cmd->add_option("--quantity", quantity, "m0, mt, gamma or all")
        ->check(CLI::IsMember({"m0", "mt", "gamma", "all"}))
        ->capture_default_str();
    table_cmd->add_option("--beta", beta, "Inverse temperature")->required();
    table_cmd->add_option("--k-min", k_min, "Smallest |k|")->required();
    table_cmd->add_option("--k-max", k_max, "Largest |k|")->required();
    table_cmd->add_option("--samples", samples, "Number of samples")->required();
    table_cmd->add_flag("--log-k", log_k, "Logarithmic spacing in |k|");
    table_cmd->add_option("--scheme-file", scheme_file, "Scheme JSON (default masses 1, 2, 3)");
    table_cmd->add_option("--out", out_path, "CSV output path")->required();

    std::string field_path;
    double kappa = 1.0, energy_tol = 1e-9;
    auto* energy_cmd = app.add_subcommand("energy", "Quadratic free energy of a field file");
    energy_cmd->add_option("--field", field_path, "Field JSON document")->required();
    energy_cmd->add_option("--beta", beta, "Inverse temperature")->required();
    energy_cmd->add_option("--scheme-file", scheme_file, "Scheme JSON (default masses 1, 2, 3)");
    energy_cmd->add_option("--kappa", kappa, "Remainder constant")->capture_default_str();
    energy_cmd->add_option("--tol", energy_tol, "Relative quadrature tolerance")->capture_default_str();
    energy_cmd->add_option("--out", out_path, "Report JSON output path")->required();

    std::string suite = "all";
    double verify_tol = 1e-3;
    auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
    std::vector<std::string> suites = suite_names();
    suites.push_back("all");
    verify_cmd->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(suites))->capture_default_str();
    verify_cmd->add_option("--tol", verify_tol, "Relative tolerance of oracle comparisons")->capture_default_str();

    double uk = 0.0;
    auto* uehling_cmd = app.add_subcommand("uehling", "Evaluate the Uehling function");
    uehling_cmd->add_option("--k", uk, "|k|")->required();

    CommandOutcome outcome;
    try {
        std::vector<std::string> rev(argv.rbegin(), argv.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        outcome.summary = "help";
        return outcome;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        outcome.summary = "help";
        return outcome;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        outcome.exit_code = 2;
        outcome.summary = e.what();
        return outcome;
    }

    try {
        if (*scheme_cmd) {
            PauliVillarsScheme s;
            if (*o_cut) s = scheme_from_cutoff(m0, cutoff, ratio);
            else if (*o_m1) s = scheme_from_masses(m0, m1, m2);
            else throw CLI::ValidationError("scheme", "either --m1/--m2 or --cutoff is required");
            const std::string text = dump_json(scheme_to_json(s));
            if (!json_path.empty()) {
                write_file(json_path, text);
                outcome.artifacts.push_back(json_path);
            }
            out << text;
            outcome.summary = "scheme cutoff " + format17(s.cutoff);
        } else if (*table_cmd) {
            const auto s = detail::load_scheme(scheme_file);
            const unsigned q = quantity == "m0" ? quantity_m_zero
                               : quantity == "mt" ? quantity_m_thermal
                               : quantity == "gamma" ? quantity_gamma
                                                     : quantity_all;
            const auto spacing = log_k ? KSpacing::log : KSpacing::linear;
            const auto t = build_table(s, beta, k_grid(k_min, k_max, samples, spacing), spacing, {}, q);
            write_file(out_path, table_csv(t));
            outcome.artifacts.push_back(out_path);
            outcome.summary = "wrote " + std::to_string(t.samples.size()) + " samples to " + out_path;
            out << outcome.summary << "\n";
        } else if (*energy_cmd) {
            const auto s = detail::load_scheme(scheme_file);
            const auto field = load_grid_field(read_file(field_path));
            const auto spectral = coulomb_project(spectral_transform(field));
            QuadratureSpec spec;
            spec.rel_tol = energy_tol;
            FreeEnergyOptions opt;
            opt.kappa = kappa;
            const auto rep = quadratic_free_energy(spectral, beta, s, spec, opt);
            write_file(out_path, dump_json(report_to_json(rep, s, spectral)));
            outcome.artifacts.push_back(out_path);
            outcome.summary = "f2_total " + format17(rep.f2_total);
            out << outcome.summary << "\n";
        } else if (*verify_cmd) {
            VerifyOptions opt;
            opt.oracle_rel_tol = verify_tol;
            const auto results = run_suite(suite, opt);
            std::vector<std::string> failed;
            for (const auto& r : results) {
                out << (r.passed ? "PASS " : "FAIL ") << r.suite << ": " << r.name << " | " << r.detail << "\n";
                if (!r.passed) failed.push_back(r.suite + ": " + r.name);
            }
            ordered_json f = failed;
            out << "failures: " << f.dump() << "\n";
            outcome.exit_code = failed.empty() ? 0 : 1;
            outcome.summary = std::to_string(results.size() - failed.size()) + "/" + std::to_string(results.size()) +
                              " checks passed";
            out << outcome.summary << "\n";
        } else if (*uehling_cmd) {
            const double u = uehling(uk);
            out << format17(u) << "\n";
            outcome.summary = "U(" + format17(uk) + ") = " + format17(u);
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        outcome.exit_code = 2;
        outcome.summary = e.what();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        outcome.exit_code = 3;
        outcome.summary = e.what();
    }
    return outcome;
}

}  // namespace pvfree
