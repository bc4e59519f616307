#include "kl/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace kl;
using namespace kl::scn;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::size_t cap = 0;
    Digit probe_bound = 5;
    std::string out;
    std::string format = "text";

    RunOptions options() const { return RunOptions{seed, cap ? std::optional<std::size_t>(cap) : std::nullopt, probe_bound}; }
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const Common& c, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream o(c.out);
    if (!o) throw std::runtime_error("cannot write " + c.out);
    o << text;
}

Scenario load(const std::string& path)
{
    try {
        return parse_scenario(read_file(path));
    } catch (const ScenarioError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--seed", c.seed, "seed for generated corpora")->capture_default_str();
    app->add_option("--cap", c.cap, "iteration cap (0 = default 10K + 16)")->capture_default_str();
    app->add_option("--probe-bound", c.probe_bound, "digit bound of oracle probe points")->capture_default_str();
    app->add_option("--out", c.out, "write output to this file");
    app->add_option("--format", c.format, "text or structured")->check(CLI::IsMember({"text", "structured"}))->capture_default_str();
}

int finish(const Common& c, const Report& rep)
{
    emit(c, render(rep, c.format));
    return rep.exit_status();
}

/// A scenario with the file's declarations and one generated command.
Scenario with_command(const Scenario& sc, const std::string& line)
{
    std::string text = print_scenario(sc);
    std::string decls;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        static const std::set<std::string> verbs{"rank", "report", "iterate", "convert", "approx", "separate", "verify"};
        if (!verbs.count(l.substr(0, l.find(' ')))) decls += l + "\n";
    }
    try {
        return parse_scenario(decls + line + "\n");
    } catch (const ScenarioError& e) {
        throw std::runtime_error(std::string("arguments: ") + e.message() + (e.expected().empty() ? "" : " (expected " + e.expected() + ")"));
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ranks of Baire class 1 step functions on countable ordinals"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);
    Common common;

    std::string file;
    auto* report = app.add_subcommand("report", "run every command of a scenario");
    report->add_option("scenario", file)->required()->check(CLI::ExistingFile);

    std::string func, kind = "all", with;
    auto* rank = app.add_subcommand("rank", "rank commands of a scenario, or all ranks of one function");
    rank->add_option("scenario", file)->required()->check(CLI::ExistingFile);
    rank->add_option("--func", func, "function to rank");
    rank->add_option("--kind", kind, "alpha, beta, gamma or all")->check(CLI::IsMember({"alpha", "beta", "gamma", "all"}))->capture_default_str();
    rank->add_option("--with", with, "template for the gamma upper bound");

    std::string from, to;
    auto* convert = app.add_subcommand("convert", "chain from a separation derivative, or a template from a chain");
    convert->add_option("scenario", file)->required()->check(CLI::ExistingFile);
    auto* conv_chain = convert->add_option("--chain", from, "chain name to turn into a canonical template");
    convert->add_option("--from", from, "set A of a disjoint pair")->excludes(conv_chain);
    convert->add_option("--to", to, "set B of a disjoint pair");

    std::string eps;
    auto* approx = app.add_subcommand("approx", "grid step approximation");
    approx->add_option("scenario", file)->required()->check(CLI::ExistingFile);
    approx->add_option("func", func)->required();
    approx->add_option("--eps", eps, "grid step")->required();

    std::string p, q;
    auto* separate = app.add_subcommand("separate", "separator of {f <= p} and {f >= q}");
    separate->add_option("scenario", file)->required()->check(CLI::ExistingFile);
    separate->add_option("func", func)->required();
    separate->add_option("--p", p)->required();
    separate->add_option("--q", q)->required();

    std::string suite;
    std::size_t corpus = 25;
    auto* verify = app.add_subcommand("verify", "invariant and axiom suites");
    verify->add_option("suite", suite, "axioms-alpha, axioms-beta, axioms-constant, closure, oracle, or a scenario file")->required();
    verify->add_option("--corpus", corpus, "corpus size for axiom suites")->capture_default_str();

    auto* fmt = app.add_subcommand("fmt", "print a scenario in canonical form");
    fmt->add_option("scenario", file)->required()->check(CLI::ExistingFile);

    for (auto* s : {report, rank, convert, approx, separate, verify}) add_common(s, common);
    fmt->add_option("--out", common.out, "write output to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fmt) {
            emit(common, print_scenario(load(file)));
            return 0;
        }
        if (*report) return finish(common, run_scenario(load(file), common.options()));
        if (*rank) {
            Scenario sc = load(file);
            if (func.empty()) return finish(common, run_scenario(sc, common.options(), {"rank"}));
            std::string t = with.empty() ? "" : " with " + with;
            if (kind == "all") return finish(common, run_scenario(with_command(sc, "report " + func + t), common.options()));
            if (kind != "gamma") t.clear();
            return finish(common, run_scenario(with_command(sc, "rank " + kind + " " + func + t), common.options()));
        }
        if (*convert) {
            Scenario sc = load(file);
            if (convert->count("--chain")) return finish(common, run_scenario(with_command(sc, "convert template " + from), common.options()));
            if (from.empty() || to.empty()) {
                if (sc.commands.empty()) throw std::runtime_error("convert needs --chain, or --from and --to");
                return finish(common, run_scenario(sc, common.options(), {"convert"}));
            }
            return finish(common, run_scenario(with_command(sc, "convert chain " + from + " " + to), common.options()));
        }
        if (*approx) return finish(common, run_scenario(with_command(load(file), "approx " + func + " " + eps), common.options()));
        if (*separate)
            return finish(common, run_scenario(with_command(load(file), "separate " + func + " " + p + " " + q), common.options()));
        if (*verify) {
            const std::string n = std::to_string(corpus);
            std::string line;
            if (suite == "axioms-alpha") line = "verify axioms alpha " + n;
            else if (suite == "axioms-beta") line = "verify axioms beta " + n;
            else if (suite == "axioms-constant") line = "verify axioms constant " + n;
            if (!line.empty()) return finish(common, run_scenario(parse_scenario("space 1\n" + line + "\n"), common.options()));
            if (suite == "closure" || suite == "oracle") {
                CorpusGenerator gen(common.seed);
                std::string text;
                for (int i = 0; i < 6; ++i) {
                    Space s = gen.space(1, 3);
                    std::string decl = suite == "closure" ? "set S = " + gen.set(s).str() : "func f = " + function_str(gen.step_function(s));
                    text += "space " + std::to_string(s.dims()) + "\n" + decl + "\nverify " + suite + (suite == "closure" ? " S" : " f") + "\n";
                }
                Report all;
                all.options = common.options();
                all.banners = {vacuity_banner(), gamma_banner()};
                std::istringstream in(text);
                for (std::string a, b, c; std::getline(in, a) && std::getline(in, b) && std::getline(in, c);) {
                    Report r = run_scenario(parse_scenario(a + "\n" + b + "\n" + c + "\n"), common.options());
                    r.records[0].command = b + " ; " + c;
                    all.records.push_back(r.records[0]);
                }
                return finish(common, all);
            }
            return finish(common, run_scenario(load(suite), common.options(), {"verify"}));
        }
    } catch (const std::exception& e) {
        std::cerr << "klrank: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
