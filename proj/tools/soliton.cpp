#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "soliton/cli.hpp"

using nlohmann::json;

namespace {

struct Shortcut {
    std::string family = "fermat-quotient";
    long long p = 11;
    std::optional<int> precision;
    int d = 5, a = 2, g = 2, l = 3, b = 1;
    int level = 1;
    bool full = false;
};

json synthesize(const Shortcut& s, const std::string& check)
{
    json curve{{"family", s.family}};
    if (s.family == "fermat-quotient") {
        curve["d"] = s.d;
        curve["a"] = s.a;
    } else if (s.family == "hyperelliptic-x5x") {
        curve["g"] = s.g;
    } else if (s.family == "power-plus-one") {
        curve["l"] = s.l;
    } else if (s.family == "even-quadratic") {
        curve["l"] = s.l;
        curve["a"] = s.a;
        curve["b"] = s.b;
    }
    json cfg{{"p", s.p}, {"curve", curve}, {"level", s.level}, {"full_torsion", s.full}, {"checks", {check}}};
    if (s.precision) cfg["precision"] = *s.precision;
    return cfg;
}

int execute(const json& raw, const std::vector<std::string>& only, const std::string& format, const std::string& out)
{
    json report;
    int code = 0;
    try {
        json cfg = raw;
        if (!only.empty() && cfg.is_object()) cfg["checks"] = only;
        soliton::RunConfig rc = soliton::parse_config(cfg);
        report = soliton::run(rc);
        code = soliton::exit_code(report);
    } catch (const soliton::ConfigInvalid& e) {
        report = soliton::config_error_report(e);
        std::cerr << e.what() << "\n";
        code = 3;
    }
    std::string text = soliton::emit(report, format);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f) {
            std::cerr << "cannot write " << out << "\n";
            return 3;
        }
        f << text;
    }
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"p-adic Sato Grassmannian toolkit"};
    app.require_subcommand(1);

    std::string config_path, format = "json", out;
    std::vector<std::string> only;
    auto* run = app.add_subcommand("run", "run the checks listed in a JSON config");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--check", only, "restrict to these checks")
        ->check(CLI::IsMember({"gaps", "hasse-witt", "formal-log", "torsion", "theta", "all"}));
    run->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
    run->add_option("--out", out, "write the report here");

    Shortcut sc;
    std::string sc_format = "json", sc_out;
    std::vector<std::pair<std::string, CLI::App*>> shortcuts;
    for (const auto& name : soliton::check_names()) {
        auto* sub = app.add_subcommand(name, "run only the " + name + " check on a synthesized config");
        sub->add_option("--family", sc.family)
            ->check(CLI::IsMember({"fermat-quotient", "hyperelliptic-x5x", "power-plus-one", "even-quadratic"}));
        sub->add_option("-p,--prime", sc.p);
        sub->add_option("--precision", sc.precision);
        sub->add_option("-d", sc.d);
        sub->add_option("-a", sc.a);
        sub->add_option("-b", sc.b);
        sub->add_option("-g", sc.g);
        sub->add_option("-l", sc.l);
        sub->add_option("-n,--level", sc.level);
        sub->add_flag("--full", sc.full, "also solve for the full torsion vector");
        sub->add_option("--format", sc_format)->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--out", sc_out);
        shortcuts.push_back({name, sub});
    }

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        std::ifstream f(config_path);
        if (!f) {
            std::cerr << "cannot read " << config_path << "\n";
            return 3;
        }
        json raw;
        try {
            raw = json::parse(f);
        } catch (const json::parse_error& e) {
            soliton::ConfigInvalid err(std::vector<soliton::ConfigIssue>{{"", std::string("not valid JSON: ") + e.what()}});
            std::cerr << err.what() << "\n";
            std::cout << soliton::emit(soliton::config_error_report(err), format);
            return 3;
        }
        return execute(raw, only, format, out);
    }
    for (const auto& [name, sub] : shortcuts)
        if (sub->parsed()) return execute(synthesize(sc, name), {}, sc_format, sc_out);
    return 3;
}
