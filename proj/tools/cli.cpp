#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hodn/cbc.hpp"
#include "hodn/interlace.hpp"
#include "hodn/randomize.hpp"

#ifndef HODN_DEFAULT_DIRECTIONS
#define HODN_DEFAULT_DIRECTIONS ""
#endif

namespace hodn::cli {

namespace {

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string joined(const std::vector<std::string>& args) {
    std::string s;
    for (const auto& a : args) {
        if (!s.empty()) s += ' ';
        s += a;
    }
    return s;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

Weights weights_for(const std::string& spec, int s) {
    try {
        return Weights::parse(spec, s);
    } catch (const malformed_input&) {
        throw;
    } catch (const std::exception& e) {
        throw usage_error(e.what());
    }
}

std::pair<int, int> parse_range(const std::string& text) {
    auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            int v = std::stoi(text);
            return {v, v};
        }
        return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw usage_error("bad m range '" + text + "', expected lo:hi");
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    for (std::string t; std::getline(ss, t, ',');) {
        try {
            out.push_back(std::stoi(t));
        } catch (const std::exception&) {
            throw usage_error("bad integer list '" + text + "'");
        }
    }
    return out;
}

std::string column_label(const TableSpec& spec, int s, std::pair<int, int> ad, const std::string& method) {
    std::string label = "s" + std::to_string(s);
    if (spec.alpha_d.size() > 1) label += "_a" + std::to_string(ad.first) + "d" + std::to_string(ad.second);
    return label + "_" + method;
}

}  // namespace

std::string default_directions_file() {
    if (const char* env = std::getenv("HODN_DIRECTIONS")) return env;
    return HODN_DEFAULT_DIRECTIONS;
}

TableSpec table_preset(int number) {
    TableSpec t;
    switch (number) {
        case 1: t.s_values = {1, 2, 5}; break;
        case 2:
            t.s_values = {3};
            t.alpha_d = {{2, 2}, {3, 3}};
            break;
        case 3:
            t.s_values = {1, 2, 5};
            t.weights = "j^-2";
            break;
        case 4:
            t.s_values = {3};
            t.alpha_d = {{2, 2}, {3, 3}};
            t.weights = "j^-2";
            break;
        case 5: t.s_values = {10, 20, 50}; break;
        case 6:
            t.s_values = {10, 20, 50};
            t.weights = "j^-2";
            break;
        case 7:
        case 8:
        case 9:
            t.kind = "rmse";
            t.weights = "j^-2";
            t.s_values = number == 7 ? std::vector<int>{1, 2} : number == 8 ? std::vector<int>{5, 10} : std::vector<int>{20, 50};
            break;
        default: throw usage_error("unknown table " + std::to_string(number) + ", expected 1..9");
    }
    return t;
}

TableData run_table(const TableSpec& spec, const std::string& directions) {
    if (spec.kind != "criterion" && spec.kind != "rmse") throw usage_error("unknown sweep kind '" + spec.kind + "'");
    const bool with_sobol = spec.sobol && !directions.empty() && std::ifstream(directions).good();
    TableData data;
    for (int s : spec.s_values)
        for (auto ad : spec.alpha_d) {
            if (with_sobol) data.columns.push_back(column_label(spec, s, ad, "sobol"));
            data.columns.push_back(column_label(spec, s, ad, "plps"));
        }
    for (int m = spec.m_lo; m <= spec.m_hi; ++m) {
        std::vector<double> row;
        for (int s : spec.s_values) {
            if (s < 1) throw usage_error("s must be positive");
            Weights w = weights_for(spec.weights, s);
            for (auto [alpha, d] : spec.alpha_d) {
                CriterionParams params{2, alpha, d};
                params.validate();
                auto res = cbc_construct_fast(m, s, params, w);
                if (spec.kind == "criterion") {
                    if (with_sobol)
                        row.push_back(double(criterion_B(load_external_net(directions, d * s, m), w, params)));
                    row.push_back(res.B_final);
                } else {
                    if (with_sobol) {
                        auto net = interlace_net(d, load_external_net(directions, d * s, m));
                        row.push_back(rmse_experiment(test_function, net, spec.shifts, spec.seed).rmse);
                    }
                    auto net = interlace_net(d, generate_points(res.lattice()));
                    row.push_back(rmse_experiment(test_function, net, spec.shifts, spec.seed).rmse);
                }
            }
        }
        data.m.push_back(m);
        data.rows.push_back(std::move(row));
    }
    return data;
}

namespace {

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> args;
};

struct ConstructFlags {
    int b = 2, m = 0, s = 0, alpha = 2, d = 2;
    std::string weights = "1", p, mode = "fast", out;
    double lambda = 1.0;
    double budget = CbcOptions{}.naive_budget;
    bool provenance = false;
};

int do_construct(const ConstructFlags& f, Context& ctx) {
    if (f.s < 1) throw usage_error("--s must be at least 1");
    if (f.m < 1) throw usage_error("--m must be at least 1");
    CriterionParams params{f.b, f.alpha, f.d};
    try {
        params.validate();
        require_prime_base(f.b);
    } catch (const std::exception& e) {
        throw usage_error(e.what());
    }
    Weights w = weights_for(f.weights, f.s);
    if (f.mode == "fast" && !w.is_product())
        throw usage_error("general weights are only supported with --mode naive");
    std::optional<GFPoly> p;
    if (!f.p.empty()) {
        try {
            p = GFPoly::parse(f.b, f.p);
        } catch (const std::exception& e) {
            throw usage_error(std::string("bad --p: ") + e.what());
        }
        if (p->degree() != f.m) throw usage_error("--p must have degree m");
        if (!is_irreducible(*p)) throw usage_error("--p must be irreducible");
    }
    CbcOptions opt;
    opt.lambda = f.lambda;
    opt.naive_budget = f.budget;
    ConstructionResult res = f.mode == "naive" ? cbc_construct_naive(f.m, f.s, params, w, p, opt)
                                               : cbc_construct_fast(f.m, f.s, params, w, p, opt);
    std::string text = result_to_json(res, f.provenance);
    if (f.provenance) {
        auto j = nlohmann::ordered_json::parse(text);
        j["provenance"]["command"] = joined(ctx.args);
        j["provenance"]["threads"] = thread_count();
        text = j.dump(2);
    }
    write_text(f.out, text + "\n");
    ctx.out << "p = " << res.p.to_string() << "\n";
    ctx.out << "B_final = " << format_full(res.B_final) << " (" << format_sci(res.B_final) << ")\n";
    ctx.out << "bound = " << format_full(res.bound) << " (" << format_sci(res.bound) << ", lambda " << res.lambda << ")\n";
    return ok;
}

struct PointsFlags {
    std::string net, format = "csv", out;
    bool raw = false, interlaced = false, provenance = false;
};

int do_points(const PointsFlags& f, Context& ctx) {
    if (f.format != "csv" && f.format != "bin") throw usage_error("--format must be csv or bin");
    auto res = load_result(f.net);
    PointSet pts = generate_points(res.lattice());
    if (!f.raw) pts = interlace_net(res.d, pts);
    if (f.format == "csv") {
        save_points_csv(pts, f.out, f.provenance ? "provenance: " + joined(ctx.args) : std::string());
    } else {
        save_points_binary(pts, f.out);
        if (f.provenance) {
            nlohmann::ordered_json j;
            j["command"] = joined(ctx.args);
            j["net"] = nlohmann::ordered_json::parse(result_to_json(res, false));
            write_text(f.out + ".provenance.json", j.dump(2) + "\n");
        }
    }
    ctx.out << "wrote " << pts.size() << " points of dimension " << pts.dim() << " to " << f.out << "\n";
    return ok;
}

struct CriterionFlags {
    std::string net, points, sobol, weights;
    int m = -1, s = 0, alpha = 0, d = 0;
    bool oracle = false;
    int cap = 0;
};

int do_criterion(const CriterionFlags& f, Context& ctx) {
    int sources = int(!f.net.empty()) + int(!f.points.empty()) + int(!f.sobol.empty());
    if (sources != 1) throw usage_error("give exactly one of --net, --points, --sobol");
    PointSet pts;
    std::optional<ConstructionResult> res;
    int alpha = f.alpha, d = f.d;
    if (!f.net.empty()) {
        res = load_result(f.net);
        pts = generate_points(res->lattice());
        if (!alpha) alpha = res->alpha;
        if (!d) d = res->d;
    } else if (!f.points.empty()) {
        pts = load_points(f.points);
    } else {
        if (f.m < 0 || f.s < 1) throw usage_error("--sobol needs --m and --s");
        if (!d) d = 2;
        pts = load_external_net(f.sobol, d * f.s, f.m);
    }
    if (!alpha) alpha = 2;
    if (!d) d = 2;
    CriterionParams params{pts.b, alpha, d};
    try {
        params.validate();
    } catch (const std::exception& e) {
        throw usage_error(e.what());
    }
    if (pts.dim() % d != 0) throw usage_error("point dimension is not a multiple of d");
    const int s = int(pts.dim()) / d;
    Weights w = weights_for(f.weights.empty() ? "1" : f.weights, s);
    if (f.weights.empty() && res && res->s == s) {
        if (!res->weight_values.empty())
            w = Weights::product(res->weight_values, res->weights);
        else
            w = weights_for(res->weights, s);
    }
    extended B = criterion_B(pts, w, params);
    ctx.out << "B = " << format_full(double(B)) << " (" << format_sci(double(B)) << ")\n";
    if (f.oracle) {
        if (!res) throw usage_error("--oracle needs --net");
        const int cap = f.cap ? f.cap : res->m + 10;
        const int ds = res->d * res->s;
        const double log_work = double(res->m) * ds * std::log2(double(res->b)) + ds;
        if (ds > 16 || log_work > 30 || cap * std::log2(double(res->b)) > 28)
            throw budget_exceeded("dual-net oracle request too large (needs m*ds <= ~24 and a small cap)");
        auto o = criterion_B_dual_oracle(res->lattice(), w, params, cap);
        ctx.out << "oracle = " << format_full(double(o.value)) << "\n";
        ctx.out << "oracle_tail_bound = " << format_full(double(o.tail_bound)) << "\n";
    }
    return ok;
}

struct IntegrateFlags {
    std::string net, points, function = "test1", out, csv;
    int shifts = 50, precision = 0;
    unsigned long long seed = 0;
};

int do_integrate(const IntegrateFlags& f, Context& ctx) {
    if ((!f.net.empty()) == (!f.points.empty())) throw usage_error("give exactly one of --net, --points");
    if (f.shifts < 2) throw usage_error("--shifts must be at least 2");
    Integrand fn;
    if (f.function == "test1")
        fn = test_function;
    else if (f.function == "const")
        fn = [](std::span<const double>) { return 1.0; };
    else
        throw usage_error("unknown function '" + f.function + "'");
    PointSet pts;
    std::optional<ConstructionResult> res;
    if (!f.net.empty()) {
        res = load_result(f.net);
        pts = interlace_net(res->d, generate_points(res->lattice()));
    } else {
        pts = load_points(f.points);
    }
    auto rep = rmse_experiment(fn, pts, f.shifts, f.seed, f.precision);
    if (!f.csv.empty()) {
        std::ostringstream row;
        row << "m,s,alpha,d,weights,r,Q_bar,rmse,seed\n";
        if (res)
            row << res->m << ',' << res->s << ',' << res->alpha << ',' << res->d << ",\"" << res->weights << '"';
        else
            row << ",,,,";
        row << ',' << rep.shifts << ',' << format_full(rep.mean) << ',' << format_full(rep.rmse) << ',' << rep.seed << '\n';
        write_text(f.csv, row.str());
    }
    ctx.out << "mean = " << format_full(rep.mean) << "\n";
    ctx.out << "rmse = " << format_full(rep.rmse) << " (" << format_sci(rep.rmse) << ")\n";
    if (!f.out.empty()) {
        nlohmann::ordered_json j;
        j["function"] = f.function;
        j["shifts"] = rep.shifts;
        j["seed"] = rep.seed;
        j["generator"] = rep.generator;
        j["precision"] = rep.precision;
        j["mean"] = rep.mean;
        j["rmse"] = rep.rmse;
        j["estimates"] = rep.estimates;
        j["command"] = joined(ctx.args);
        write_text(f.out, j.dump(2) + "\n");
    }
    return ok;
}

struct TableFlags {
    int table = 0;
    std::string s_list, alpha_d, weights, m_range, kind, out, directions;
    int shifts = 50;
    unsigned long long seed = 0;
    bool no_sobol = false;
};

int do_table(const TableFlags& f, Context& ctx) {
    TableSpec spec = f.table ? table_preset(f.table) : TableSpec{};
    if (!f.table && f.s_list.empty()) throw usage_error("give --table or an explicit sweep with --s");
    if (!f.s_list.empty()) spec.s_values = parse_int_list(f.s_list);
    if (!f.alpha_d.empty()) {
        spec.alpha_d.clear();
        for (int v : parse_int_list(f.alpha_d)) spec.alpha_d.push_back({v, v});
    }
    if (!f.weights.empty()) spec.weights = f.weights;
    if (!f.kind.empty()) spec.kind = f.kind;
    if (!f.m_range.empty()) std::tie(spec.m_lo, spec.m_hi) = parse_range(f.m_range);
    spec.shifts = f.shifts;
    spec.seed = f.seed;
    spec.sobol = !f.no_sobol;
    if (spec.kind == "rmse" && spec.shifts < 2) throw usage_error("--shifts must be at least 2");
    auto data = run_table(spec, f.directions.empty() ? default_directions_file() : f.directions);

    std::ostringstream csv;
    csv << "m";
    for (const auto& c : data.columns) csv << ',' << c;
    csv << '\n';
    for (std::size_t i = 0; i < data.m.size(); ++i) {
        csv << data.m[i];
        for (double v : data.rows[i]) csv << ',' << format_full(v);
        csv << '\n';
    }
    if (f.out.empty() || f.out == "-") {
        ctx.out << csv.str();
        return ok;
    }
    write_text(f.out, csv.str());
    ctx.out << "m";
    for (const auto& c : data.columns) ctx.out << '\t' << c;
    ctx.out << '\n';
    for (std::size_t i = 0; i < data.m.size(); ++i) {
        ctx.out << data.m[i];
        for (double v : data.rows[i]) ctx.out << '\t' << format_sci(v);
        ctx.out << '\n';
    }
    return ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{out, err, args};
    CLI::App app{"Higher-order digital nets from interlaced polynomial lattice rules", "hodn"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read flag defaults from a key = value file");

    ConstructFlags cf;
    auto* construct = app.add_subcommand("construct", "Search generating vectors component by component");
    construct->add_option("--b", cf.b, "Prime base")->capture_default_str();
    construct->add_option("--m", cf.m, "Points are b^m")->required();
    construct->add_option("--s", cf.s, "Dimension of the interlaced net")->required();
    construct->add_option("--alpha", cf.alpha, "Smoothness")->capture_default_str();
    construct->add_option("--d", cf.d, "Interlacing factor")->capture_default_str();
    construct->add_option("--weights", cf.weights, "1, 0.5, j^-2, list:a,b,.. or general:@file")->capture_default_str();
    construct->add_option("--p", cf.p, "Irreducible modulus of degree m, e.g. x^4+x+1 or 19");
    construct->add_option("--mode", cf.mode, "fast or naive")->check(CLI::IsMember({"fast", "naive"}))->capture_default_str();
    construct->add_option("--lambda", cf.lambda, "Exponent of the reported bound")->capture_default_str();
    construct->add_option("--budget", cf.budget, "Largest ds*b^(2m) accepted by the naive search")->capture_default_str();
    construct->add_option("--out", cf.out, "Output JSON file")->required();
    construct->add_flag("--provenance", cf.provenance, "Embed tool and command details");

    PointsFlags pf;
    auto* points = app.add_subcommand("points", "Write the points of a constructed net");
    points->add_option("--net", pf.net, "Construction JSON")->required();
    auto* raw = points->add_flag("--raw", pf.raw, "Lattice points of dimension d*s");
    points->add_flag("--interlaced", pf.interlaced, "Interlaced net of dimension s (default)")->excludes(raw);
    points->add_option("--format", pf.format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}))->capture_default_str();
    points->add_option("--out", pf.out, "Output file")->required();
    points->add_flag("--provenance", pf.provenance, "Embed tool and command details");

    CriterionFlags kf;
    auto* crit = app.add_subcommand("criterion", "Evaluate the quality criterion");
    crit->add_option("--net", kf.net, "Construction JSON");
    crit->add_option("--points", kf.points, "Point file in lattice layout (dimension d*s)");
    crit->add_option("--sobol", kf.sobol, "Direction numbers or generating matrices file");
    crit->add_option("--m", kf.m, "Points are 2^m (with --sobol)");
    crit->add_option("--s", kf.s, "Interlaced dimension (with --sobol)");
    crit->add_option("--alpha", kf.alpha, "Smoothness (default from the net, else 2)");
    crit->add_option("--d", kf.d, "Interlacing factor (default from the net, else 2)");
    crit->add_option("--weights", kf.weights, "Weight specification (default from the net, else 1)");
    crit->add_flag("--oracle", kf.oracle, "Also sum the dual net directly (small nets only)");
    crit->add_option("--cap", kf.cap, "Digit cap of the dual-net sum (default m+10)");

    IntegrateFlags inf;
    auto* integ = app.add_subcommand("integrate", "Randomly shifted QMC estimate and rmse");
    integ->add_option("--net", inf.net, "Construction JSON (integrates the interlaced net)");
    integ->add_option("--points", inf.points, "Point file, used as is");
    integ->add_option("--function", inf.function, "test1 or const")->capture_default_str();
    integ->add_option("--shifts", inf.shifts, "Number of random shifts")->capture_default_str();
    integ->add_option("--seed", inf.seed, "Random seed")->capture_default_str();
    integ->add_option("--precision", inf.precision, "Shift digits (0 picks a default)")->capture_default_str();
    integ->add_option("--out", inf.out, "Optional JSON report");
    integ->add_option("--csv", inf.csv, "Optional one-row CSV report");

    TableFlags tf;
    auto* table = app.add_subcommand("table", "Sweep m and write a CSV table");
    table->add_option("--table", tf.table, "Preset 1..9");
    table->add_option("--s", tf.s_list, "Comma separated dimensions");
    table->add_option("--alpha-d", tf.alpha_d, "Comma separated alpha=d values");
    table->add_option("--weights", tf.weights, "Weight specification");
    table->add_option("--m-range", tf.m_range, "lo:hi, inclusive");
    table->add_option("--kind", tf.kind, "criterion or rmse");
    table->add_option("--shifts", tf.shifts, "Shifts for rmse sweeps")->capture_default_str();
    table->add_option("--seed", tf.seed, "Random seed for rmse sweeps")->capture_default_str();
    table->add_option("--directions", tf.directions, "Sobol' direction numbers file");
    table->add_flag("--no-sobol", tf.no_sobol, "Skip the Sobol' columns");
    table->add_option("--out", tf.out, "CSV file (stdout when omitted)");

    std::vector<std::string> storage{"hodn"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : storage) argv.push_back(a.data());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return ok;
        err << "error: " << e.what() << "\n";
        return usage;
    }

    try {
        if (construct->parsed()) return do_construct(cf, ctx);
        if (points->parsed()) return do_points(pf, ctx);
        if (crit->parsed()) return do_criterion(kf, ctx);
        if (integ->parsed()) return do_integrate(inf, ctx);
        if (table->parsed()) return do_table(tf, ctx);
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const budget_exceeded& e) {
        err << "error: " << e.what() << "\n";
        return budget;
    } catch (const malformed_input& e) {
        err << "error: " << e.what() << "\n";
        return malformed;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
    return usage;
}

}  // namespace hodn::cli
