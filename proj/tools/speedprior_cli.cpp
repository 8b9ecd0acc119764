// speedprior: command-line front end.
//
// Exit codes: 0 success, 1 usage or internal error (and failed verify suites),
// 2 an uncertified result under --strict.

#include "speedprior/enumerate.hpp"
#include "speedprior/measures.hpp"
#include "speedprior/predictor.hpp"
#include "speedprior/priors.hpp"
#include "speedprior/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace speedprior;
using json = nlohmann::ordered_json;

struct Common {
    std::string format = "json";
    bool no_timestamp = false;
    bool strict = false;
    unsigned workers = 1;
};

struct Args {
    Common common;
    std::string kind = "fast";
    std::string x;
    std::string env = "detseq:alternating";
    std::string eps = "1/2";
    std::size_t n = 0;
    std::uint64_t seed = 0;
    int k_cap = 0;
    int k = 0;
    std::string loss = "0-1";
    int tie_break = 0;
    std::string mode = "tree";
    std::string suite = "all";
    std::uint64_t seeds = 30;
    int depth = 12;
    std::string expected_errors;
};

std::string timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::ostringstream out;
    out << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void stamp(json& j, const Common& c)
{
    if (!c.no_timestamp) {
        j["generatedAt"] = timestamp();
    }
}

std::string approx(const Rational& q)
{
    std::ostringstream out;
    out << std::setprecision(6) << approx_double(q);
    return out.str();
}

// A flat key=value file becomes "--key value" tokens placed before the
// command line, so explicit flags win. "#" starts a comment.
std::vector<std::string> config_tokens(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config file " + path);
    }
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = line.substr(0, line.find('#'));
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
        }
        tokens.push_back("--" + key);
        if (value != "true") {
            tokens.push_back(value);
        }
    }
    return tokens;
}

int run_prior(const Args& a)
{
    const auto kind = priors::parse_kind(a.kind);
    const BitString x(a.x);
    const Rational eps = parse_rational(a.eps);
    priors::PriorEngine engine;
    const auto e = engine.estimate(kind, x, eps, a.k_cap > 0 ? a.k_cap : 20);
    if (a.common.format == "text") {
        std::cout << priors::to_string(kind) << " prior of '" << x << "' after " << e.phases_used << " phases\n"
                  << "  lower " << to_string(e.lower) << " (approx " << approx(e.lower) << ")\n"
                  << "  tail  " << to_string(e.tail) << " (approx " << approx(e.tail) << ")\n"
                  << "  certified " << (e.certified ? "yes" : "no") << '\n';
        if (!e.diagnostic.empty()) {
            std::cout << "  " << e.diagnostic << '\n';
        }
    } else {
        json j = json::parse(priors::to_json(e));
        stamp(j, a.common);
        std::cout << j.dump(2) << '\n';
    }
    return (a.common.strict && !e.certified) ? 2 : 0;
}

predictor::PredictorOptions predictor_options(const Args& a, priors::Kind kind)
{
    predictor::PredictorOptions po;
    po.k_cap = a.k_cap > 0 ? a.k_cap : (kind == priors::Kind::Fast ? 32 : 24);
    po.tie_break = a.tie_break != 0;
    return po;
}

int run_predict(const Args& a)
{
    const auto kind = priors::parse_kind(a.kind);
    const std::size_t n = a.n > 0 ? a.n : (kind == priors::Kind::Fast ? 64 : 10);
    const auto env = measures::MeasureSpec::parse(a.env, n);
    priors::PriorEngine engine;
    const auto trace = predictor::run_experiment(engine, env, kind, n, parse_rational(a.eps), a.seed,
                                                 predictor::LossSpec::parse(a.loss), predictor_options(a, kind));
    if (a.common.format == "csv") {
        std::cout << predictor::trace_csv(trace);
    } else if (a.common.format == "text") {
        std::cout << trace.env << ", " << priors::to_string(kind) << " prior, n=" << n << '\n'
                  << "  sequence  " << trace.sequence << '\n'
                  << "  errors    " << trace.errors() << " (informed " << trace.informed_errors() << ")\n";
        std::string predicted;
        for (const auto& s : trace.steps) {
            predicted.push_back(s.predicted ? '1' : '0');
        }
        std::cout << "  predicted " << predicted << '\n';
    } else {
        json j = json::parse(predictor::summary_json(trace));
        stamp(j, a.common);
        std::cout << j.dump(2) << '\n';
    }
    const bool all_certified =
        std::all_of(trace.steps.begin(), trace.steps.end(), [](const auto& s) { return s.certified; });
    return (a.common.strict && !all_certified) ? 2 : 0;
}

int run_adversarial(const Args& a)
{
    const auto kind = priors::parse_kind(a.kind);
    const std::size_t n = a.n > 0 ? a.n : (kind == priors::Kind::Fast ? 16 : 8);
    auto po = predictor_options(a, kind);
    if (a.k_cap <= 0) {
        po.k_cap = 24;
    }
    po.tie_break = false;
    priors::PriorEngine engine;
    const BitString z = predictor::adversarial_sequence(engine, kind, parse_rational(a.eps), n, po);
    if (a.common.format == "text") {
        std::cout << z << '\n';
    } else {
        json j{{"kind", priors::to_string(kind)}, {"n", n}, {"epsilon", a.eps}, {"sequence", z.text()}};
        stamp(j, a.common);
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int run_verify(const Args& a)
{
    verify::SuiteOptions o;
    o.k = a.k;
    o.n = a.n;
    o.epsilon = parse_rational(a.eps);
    o.k_cap = a.k_cap;
    o.workers = a.common.workers;
    o.seeds = a.seeds;
    o.seed = a.seed;
    if (!a.expected_errors.empty()) {
        o.expected_errors = std::stoul(a.expected_errors);
    }
    std::vector<std::string> names;
    if (a.suite == "all") {
        names = verify::suite_names();
    } else {
        names.push_back(a.suite);
    }
    bool ok = true;
    json reports = json::array();
    for (const auto& name : names) {
        const auto r = verify::run_suite(name, o);
        ok = ok && r.passed;
        if (a.common.format == "text") {
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << '\n';
            for (const auto& f : r.failures) {
                std::cout << "  " << f << '\n';
            }
        } else {
            reports.push_back({{"suite", r.suite}, {"result", r.passed ? "PASS" : "FAIL"}, {"data", r.data},
                               {"failures", r.failures}});
        }
    }
    if (a.common.format != "text") {
        json j = reports.size() == 1 ? reports[0] : json{{"suites", reports}};
        stamp(j, a.common);
        std::cout << j.dump(2) << '\n';
    }
    return ok ? 0 : 1;
}

int run_enumerate(const Args& a)
{
    const int k = a.k > 0 ? a.k : 8;
    enumerate::EnumerationOptions eo;
    eo.workers = std::max(1U, a.common.workers);
    const auto mode = a.mode == "naive" ? enumerate::Mode::Naive : enumerate::Mode::Tree;
    const auto ledger = enumerate::enumerate_up_to_phase(k, mode, eo);
    if (a.common.format == "text") {
        for (const auto& r : ledger.records) {
            std::cout << r.first_phase << ' ' << r.program << " -> " << r.output << " t=" << r.time << '\n';
        }
        if (ledger.naive_step_count) {
            std::cout << "naive steps " << *ledger.naive_step_count << '\n';
        }
    } else {
        std::cout << enumerate::to_json_lines(ledger);
        json j{{"k", k}, {"mode", a.mode}, {"records", ledger.records.size()}};
        if (ledger.naive_step_count) {
            j["naiveStepCount"] = *ledger.naive_step_count;
        }
        stamp(j, a.common);
        std::cout << j.dump() << '\n';
    }
    return 0;
}

int run_decoder(const Args& a)
{
    const BitString x(a.x);
    const auto env = measures::MeasureSpec::parse(a.env, x.size());
    const auto iv = measures::output_interval(env, x);
    const std::size_t km = measures::decoder_km(env, x, 64);
    const Rational m = measures::decoder_mass(env, x, static_cast<std::size_t>(a.depth));
    const Rational nu = measures::measure_eval(env, x);
    if (a.common.format == "text") {
        std::cout << "nu(" << x << ") = " << to_string(nu) << "\n  interval [" << to_string(iv.low) << ", "
                  << to_string(iv.high) << ")\n  Km " << km << "\n  mass at depth " << a.depth << ": " << to_string(m)
                  << " (approx " << approx(m) << ")\n";
    } else {
        json j{{"measure", env.text()}, {"x", x.text()},      {"nu", to_string(nu)},
               {"low", to_string(iv.low)}, {"high", to_string(iv.high)}, {"km", km},
               {"depth", a.depth},        {"mass", to_string(m)}};
        stamp(j, a.common);
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Speed prior estimation and prediction experiments on the REF-1 machine"};
    app.require_subcommand(1);
    // Config-file values come first, so a repeated flag takes the later one.
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Args a;
    std::string config;
    app.add_option("--config", config, "flat key=value file mirroring the flags");
    // The first listed format is the subcommand's default.
    std::map<CLI::App*, std::pair<CLI::Option*, std::string>> format_defaults;
    auto common = [&a, &format_defaults](CLI::App* sub, std::vector<std::string> formats) {
        auto* opt = sub->add_option("--format", a.common.format)->check(CLI::IsMember(formats));
        format_defaults[sub] = {opt, formats.front()};
        sub->add_flag("--no-timestamp", a.common.no_timestamp);
        sub->add_flag("--strict", a.common.strict, "exit 2 when a result is uncertified");
        sub->add_option("--workers", a.common.workers)->check(CLI::Range(1U, 256U));
    };
    auto eps_check = CLI::Validator(
        [](std::string& s) {
            try {
                const Rational q = parse_rational(s);
                return (q > 0 && q < 1) ? std::string() : std::string("epsilon must lie strictly between 0 and 1");
            } catch (const std::exception& e) {
                return std::string(e.what());
            }
        },
        "RATIONAL");

    auto* prior = app.add_subcommand("prior", "certified prior estimate of one string");
    common(prior, {"json", "text"});
    prior->add_option("--kind", a.kind)->check(CLI::IsMember({"kt", "fast", "Kt", "Fast"}));
    prior->add_option("--x", a.x)->required();
    prior->add_option("--eps", a.eps)->check(eps_check);
    prior->add_option("--k-cap", a.k_cap)->check(CLI::Range(1, 40));

    auto* predict = app.add_subcommand("predict", "online prediction experiment");
    common(predict, {"json", "csv", "text"});
    predict->add_option("--kind", a.kind)->check(CLI::IsMember({"kt", "fast", "Kt", "Fast"}));
    predict->add_option("--env", a.env);
    predict->add_option("--n", a.n)->check(CLI::Range(1, 4096));
    predict->add_option("--eps", a.eps)->check(eps_check);
    predict->add_option("--seed", a.seed);
    predict->add_option("--k-cap", a.k_cap)->check(CLI::Range(1, 40));
    predict->add_option("--loss", a.loss);
    predict->add_option("--tie-break", a.tie_break)->check(CLI::IsMember({0, 1}));

    auto* adv = app.add_subcommand("adversarial", "sequence the predictor always gets wrong");
    common(adv, {"text", "json"});
    adv->add_option("--kind", a.kind)->check(CLI::IsMember({"kt", "fast", "Kt", "Fast"}));
    adv->add_option("--eps", a.eps)->check(eps_check);
    adv->add_option("--n", a.n)->check(CLI::Range(1, 4096));
    adv->add_option("--k-cap", a.k_cap)->check(CLI::Range(1, 40));

    auto* ver = app.add_subcommand("verify", "run verification suites");
    common(ver, {"text", "json"});
    std::vector<std::string> suites = verify::suite_names();
    suites.push_back("all");
    ver->add_option("--suite", a.suite)->check(CLI::IsMember(suites));
    ver->add_option("--k", a.k)->check(CLI::Range(1, 40));
    ver->add_option("--n", a.n);
    ver->add_option("--eps", a.eps)->check(eps_check);
    ver->add_option("--k-cap", a.k_cap)->check(CLI::Range(1, 40));
    ver->add_option("--seeds", a.seeds);
    ver->add_option("--seed", a.seed);
    ver->add_option("--expected-errors", a.expected_errors);

    auto* en = app.add_subcommand("enumerate", "computation ledger of the first k phases");
    common(en, {"json", "text"});
    en->add_option("--k", a.k)->check(CLI::Range(1, 30));
    en->add_option("--mode", a.mode)->check(CLI::IsMember({"naive", "tree"}));

    auto* dec = app.add_subcommand("decoder", "arithmetic-coding decoder for a measure");
    common(dec, {"json", "text"});
    dec->add_option("--env", a.env)->default_val("uniform");
    dec->add_option("--x", a.x)->required();
    dec->add_option("--depth", a.depth)->check(CLI::Range(1, 64));

    std::vector<std::string> tokens;
    for (int i = argc - 1; i >= 1; --i) {
        tokens.emplace_back(argv[i]);
    }
    try {
        // CLI11 takes its vector reversed.
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            if (tokens[i + 1] == "--config") {
                const auto extra = config_tokens(tokens[i]);
                tokens.erase(tokens.begin() + static_cast<long>(i), tokens.begin() + static_cast<long>(i) + 2);
                // Subcommand name is last in the reversed vector; the file's
                // flags go right after it.
                const std::size_t insert_at = tokens.empty() ? 0 : tokens.size() - 1;
                tokens.insert(tokens.begin() + static_cast<long>(insert_at), extra.rbegin(), extra.rend());
                break;
            }
        }
        app.parse(tokens);
        for (const auto& [sub, fmt] : format_defaults) {
            if (sub->parsed() && fmt.first->count() == 0) {
                a.common.format = fmt.second;
            }
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*prior) return run_prior(a);
        if (*predict) return run_predict(a);
        if (*adv) return run_adversarial(a);
        if (*ver) return run_verify(a);
        if (*en) return run_enumerate(a);
        if (*dec) return run_decoder(a);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
