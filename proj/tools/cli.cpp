#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "commdeg/audit.hpp"
#include "commdeg/character.hpp"
#include "commdeg/comm.hpp"
#include "commdeg/error.hpp"
#include "commdeg/group_spec.hpp"
#include "commdeg/serialize.hpp"

namespace commdeg::cli {

namespace {

const char* const kSubcommands[] = {"info", "prob", "profile", "zeta", "dist", "chartab", "audit"};

struct Parser {
  CLI::App app{"Exact generalized commutativity degrees of finite groups", "commdeg"};
  Invocation inv;
  std::vector<std::string> groups;  // audit -G, repeatable
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;

  Parser() {
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    auto* info = app.add_subcommand("info", "Order, class count, center and the element table");
    add_group(info);
    add_output(info);

    auto* prob = app.add_subcommand("prob", "p_g^(n,m)(H,K) as an exact rational");
    add_query(prob);
    prob->add_option("--method", inv.method, "auto, brute, class, dist or char")
        ->check(CLI::IsMember({"auto", "brute", "class", "dist", "char"}));
    add_engine(prob);

    auto* profile = app.add_subcommand("profile", "p_g^(n,m)(H,K) for every g in one pass");
    add_query(profile);
    profile->add_option("--method", inv.method, "auto, brute, class or dist")
        ->check(CLI::IsMember({"auto", "brute", "class", "dist", "char"}));
    add_engine(profile);

    auto* zeta = app.add_subcommand("zeta", "Solution counts of [x1..xn, y1..ym] = g over H^n x G^m");
    add_query(zeta);
    add_engine(zeta);

    auto* dist = app.add_subcommand("dist", "Commutator value histogram over H^n x K^m");
    add_query(dist);
    dist->add_flag("--x-block", inv.x_block, "Histogram of the H^n block only");
    add_engine(dist);

    auto* chartab = app.add_subcommand("chartab", "Numerical character table");
    add_group(chartab);
    add_output(chartab);
    opts["chartab"]["seed"] = chartab->add_option("--seed", inv.seed, "RNG seed");
    chartab->add_option("--import", inv.import_path, "Validate and re-emit a JSON table for -G");

    auto* audit = app.add_subcommand("audit", "Run the claim battery and report findings");
    audit->add_option("-G,--group", groups, "Group spec to audit (repeatable)");
    audit->add_option("--battery", inv.battery, "Use the built-in battery")
        ->check(CLI::IsMember({"default"}));
    audit->add_option("--config", inv.config, "JSON audit configuration");
    audit->add_option("--claims", inv.claims, "Comma-separated claim tags");
    opts["audit"]["seed"] = audit->add_option("--seed", inv.seed, "RNG seed");
    audit->add_option("--emit", inv.emit, "violations or all")
        ->check(CLI::IsMember({"violations", "all"}));
    audit->add_flag("--timings", inv.timings, "Record runtime_ms per finding");
    opts["audit"]["threads"] = audit->add_option("--threads", inv.threads, "Worker threads");
    opts["audit"]["n"] = audit->add_option("-n", inv.n, "Restrict the battery to this n");
    opts["audit"]["m"] = audit->add_option("-m", inv.m, "Restrict the battery to this m");
    opts["audit"]["brute_cap"] = audit->add_option("--brute-cap", inv.brute_cap, "Brute-force cap");
    opts["audit"]["max_order"] = audit->add_option("--max-order", inv.max_order, "Order cap");
    add_output(audit);
  }

  void add_group(CLI::App* sub) {
    opts[sub->get_name()]["group"] =
        sub->add_option("-G,--group", inv.group, "Group spec, e.g. S3, D4 (order 8), Q8xC3");
    opts[sub->get_name()]["max_order"] =
        sub->add_option("--max-order", inv.max_order, "Order cap (default 10080)");
    sub->add_option("--config", inv.config, "JSON file whose keys mirror the long flags");
  }

  void add_output(CLI::App* sub) {
    opts[sub->get_name()]["output"] = sub->add_option("-o,--output", inv.output, "table, json or csv")
                                          ->check(CLI::IsMember({"table", "json", "csv"}));
  }

  void add_query(CLI::App* sub) {
    add_group(sub);
    auto& o = opts[sub->get_name()];
    o["H"] = sub->add_option("-H", inv.H, "Subgroup spec: triv, full, center, gen[..], members[..]");
    o["K"] = sub->add_option("-K", inv.K, "Subgroup spec for the y-block");
    o["n"] = sub->add_option("-n", inv.n, "Length of the H-block (>= 1)");
    o["m"] = sub->add_option("-m", inv.m, "Length of the K-block (>= 1)");
    o["g"] = sub->add_option("-g", inv.g, "Target element id, or all");
    add_output(sub);
  }

  void add_engine(CLI::App* sub) {
    auto& o = opts[sub->get_name()];
    o["predicate"] = sub->add_option("--predicate", inv.predicate, "derived or paper")
                         ->check(CLI::IsMember({"derived", "paper"}));
    o["seed"] = sub->add_option("--seed", inv.seed, "RNG seed for character tables");
    o["threads"] = sub->add_option("--threads", inv.threads, "Worker threads");
    o["brute_cap"] = sub->add_option("--brute-cap", inv.brute_cap, "Brute-force tuple cap");
    if (sub->get_name() == "prob" || sub->get_name() == "profile") {
      o["method"] = sub->get_option("--method");
    }
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json parse_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Fills options not given on the command line from a JSON object whose keys
// are the long flag names.
void apply_config(Parser& p, const std::string& sub) {
  const Json j = parse_json_file(p.inv.config);
  if (!j.is_object()) throw UsageError("--config: expected a JSON object");
  auto& known = p.opts[sub];
  for (const auto& [key, value] : j.items()) {
    auto it = known.find(key);
    if (it == known.end()) throw UsageError("--config: unknown key '" + key + "' for " + sub);
    if (it->second->count() > 0) continue;
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    try {
      it->second->add_result(text);
      it->second->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("--config: key '" + key + "': " + e.what());
    }
  }
}

// Help for the innermost subcommand that was named on the command line.
std::string help_text(CLI::App& app) {
  for (auto* sub : app.get_subcommands()) return sub->help();
  return app.help();
}

}  // namespace

Invocation parse(const std::vector<std::string>& args) {
  Parser p;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    p.app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(help_text(p.app));
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(p.app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::Error& e) {
    throw UsageError(e.what());
  }
  for (const char* name : kSubcommands) {
    if (p.app.got_subcommand(name)) p.inv.subcommand = name;
  }
  auto& o = p.opts[p.inv.subcommand];
  auto given = [&](const char* key) {
    auto it = o.find(key);
    return it != o.end() && it->second->count() > 0;
  };
  p.inv.seed_given = given("seed");
  p.inv.threads_given = given("threads");
  if (p.inv.subcommand == "audit") {
    p.inv.groups = std::move(p.groups);
    if (!given("n")) p.inv.n = 0;
    if (!given("m")) p.inv.m = 0;
    if (given("n") && p.inv.n < 1) throw UsageError("-n must be at least 1");
    if (given("m") && p.inv.m < 1) throw UsageError("-m must be at least 1");
  } else {
    if (!p.inv.config.empty()) apply_config(p, p.inv.subcommand);
    p.inv.seed_given = given("seed");
    if (p.inv.group.empty()) throw UsageError("-G,--group is required");
    if (p.inv.n < 1) throw UsageError("-n must be at least 1");
    if (p.inv.m < 1) throw UsageError("-m must be at least 1");
  }
  if (p.inv.threads < 1) throw UsageError("--threads must be at least 1");
  if (p.inv.subcommand == "prob" && p.inv.g == "all") p.inv.subcommand = "profile";
  if (p.inv.method == "char" && p.inv.subcommand != "prob") {
    throw UsageError("--method char is only valid for prob with a single element -g");
  }
  if (p.inv.method == "char" && (p.inv.n != 1 || p.inv.m != 1)) {
    throw UsageError("--method char needs -n 1 and -m 1");
  }
  return p.inv;
}

namespace {

std::size_t order_cap(const Invocation& inv) {
  if (inv.max_order) return *inv.max_order;
  if (const char* env = std::getenv("COMMDEG_MAX_ORDER")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
      throw UsageError("COMMDEG_MAX_ORDER must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  }
  return kDefaultMaxOrder;
}

// Input-resolution errors are usage errors; anything else is a computation
// failure.
template <class F>
auto resolve(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ClosureTooLarge) throw;
    throw UsageError(e.what());
  }
}

std::string fmt_double(double v, int digits) {
  if (v == 0) v = 0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Json rational_json(const Rational& q) {
  return {{"num", boost::multiprecision::numerator(q).str()},
          {"den", boost::multiprecision::denominator(q).str()}};
}

std::string complex_text(Complex z) {
  double re = std::abs(z.real()) < 5e-10 ? 0.0 : z.real();
  double im = std::abs(z.imag()) < 5e-10 ? 0.0 : z.imag();
  if (im == 0) return fmt_double(re, 6);
  std::string out = re == 0 ? "" : fmt_double(re, 6);
  out += (im < 0 ? "-" : (re == 0 ? "" : "+"));
  out += fmt_double(std::abs(im), 6) + "i";
  return out;
}

struct Query {
  GroupPtr group;
  SubgroupRef H;
  SubgroupRef K;
  std::optional<ElementId> g;
  EngineOptions opts;
};

Query resolve_query(const Invocation& inv) {
  return resolve([&] {
    auto group = parse_group_spec(inv.group, order_cap(inv));
    auto h = parse_subgroup_spec(group, inv.H);
    auto k = parse_subgroup_spec(group, inv.K);
    std::optional<ElementId> g;
    if (inv.g != "all") {
      std::size_t pos = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(inv.g, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != inv.g.size() || inv.g.empty() || inv.g[0] == '-') {
        throw UsageError("-g must be an element id or 'all', got '" + inv.g + "'");
      }
      if (v >= group->order()) {
        throw UsageError("-g " + inv.g + " out of range for order " + std::to_string(group->order()));
      }
      g = static_cast<ElementId>(v);
    }
    EngineOptions opts;
    opts.threads = inv.threads;
    if (inv.brute_cap) opts.brute_cap = *inv.brute_cap;
    opts.predicate = inv.predicate == "paper" ? Predicate::Literal : Predicate::Derived;
    return Query{group, h, k, g, opts};
  });
}

void write_table_header(std::ostream& out, const Query& q, const Invocation& inv) {
  out << "group " << q.group->name() << "  H " << q.H.label() << "  K " << q.K.label() << "  n "
      << inv.n << "  m " << inv.m;
}

// ---------------------------------------------------------------------------

int do_info(const Invocation& inv, std::ostream& out) {
  const auto group = resolve([&] { return parse_group_spec(inv.group, order_cap(inv)); });
  const auto skeleton = class_skeleton(group);
  const auto z = center(group);
  const auto& G = *group;
  if (inv.output == "json") {
    Json j;
    j["group"] = G.name();
    j["order"] = G.order();
    j["classes"] = skeleton.num_classes();
    j["center_order"] = z.order();
    j["abelian"] = G.is_abelian();
    Json elems = Json::array();
    for (ElementId x = 0; x < G.order(); ++x) {
      elems.push_back({{"id", x},
                       {"label", G.label(x)},
                       {"order", G.element_order(x)},
                       {"class", skeleton.class_of[x]}});
    }
    j["elements"] = std::move(elems);
    out << j.dump(2) << '\n';
  } else if (inv.output == "csv") {
    out << "id,label,order,class\n";
    for (ElementId x = 0; x < G.order(); ++x) {
      out << x << ",\"" << G.label(x) << "\"," << G.element_order(x) << ','
          << skeleton.class_of[x] << '\n';
    }
  } else {
    out << "group         " << G.name() << '\n'
        << "order         " << G.order() << '\n'
        << "classes       " << skeleton.num_classes() << '\n'
        << "center order  " << z.order() << '\n'
        << "abelian       " << (G.is_abelian() ? "yes" : "no") << "\n\n";
    out << std::left << std::setw(6) << "id" << std::setw(7) << "order" << std::setw(7) << "class"
        << "label\n";
    for (ElementId x = 0; x < G.order(); ++x) {
      out << std::setw(6) << x << std::setw(7) << G.element_order(x) << std::setw(7)
          << skeleton.class_of[x] << G.label(x) << '\n';
    }
  }
  return kExitOk;
}

bool char_case_supported(const Query& q, const Invocation& inv) {
  if (inv.n != 1 || inv.m != 1 || !q.K.is_full()) return false;
  return q.H.is_full() || is_normal(*q.group, q.H);
}

int do_prob_char(const Invocation& inv, const Query& q, std::ostream& out) {
  if (!char_case_supported(q, inv)) {
    throw UsageError(
        "--method char needs n = m = 1, K = full and H either full or normal in G");
  }
  CharTableOptions copts;
  copts.seed = inv.seed;
  const auto table = character_table(q.group, copts);
  const double value =
      q.H.is_full() ? prob_char_pg(table, *q.g) : prob_char_relative(table, q.H, *q.g);
  CommParams params{q.H, q.K, 1, 1, *q.g};
  const ExactProb exact = prob_fast(params, q.opts);
  const double deviation = std::abs(value - to_double(exact.value));
  if (inv.output == "json") {
    Json j;
    j["group"] = q.group->name();
    j["H"] = q.H.label();
    j["K"] = q.K.label();
    j["n"] = 1;
    j["m"] = 1;
    j["g"] = *q.g;
    j["method"] = "character";
    j["value"] = {{"real", value}};
    j["exact"] = rational_json(exact.value);
    j["deviation"] = deviation;
    out << j.dump(2) << '\n';
  } else if (inv.output == "csv") {
    out << "group,H,K,n,m,g,method,real,exact_num,exact_den,deviation\n"
        << q.group->name() << ',' << q.H.label() << ',' << q.K.label() << ",1,1," << *q.g
        << ",character," << fmt_double(value, 17) << ',' << exact.numerator() << ','
        << exact.denominator() << ',' << fmt_double(deviation, 3) << '\n';
  } else {
    write_table_header(out, q, inv);
    out << "  g " << *q.g << '\n'
        << "character     " << fmt_double(value, 12) << '\n'
        << "exact         " << to_string(exact.value) << "  deviation " << fmt_double(deviation, 3)
        << '\n';
  }
  return deviation < kComparisonTol ? kExitOk : kExitComputation;
}

int do_prob(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const Query q = resolve_query(inv);
  if (inv.method == "char") return do_prob_char(inv, q, out);
  CommParams params{q.H, q.K, inv.n, inv.m, *q.g};
  const ExactProb result = inv.method == "brute"   ? prob_brute(params, q.opts)
                           : inv.method == "class" ? prob_class_formula(params, q.opts)
                                                   : prob_fast(params, q.opts);
  std::optional<ExactProb> check;
  if (inv.method == "auto" && tuple_count(q.H, q.K, inv.n, inv.m) <= BigInt(q.opts.brute_cap)) {
    check = prob_brute(params, q.opts);
  }
  const bool agrees = !check || check->value == result.value;
  if (inv.output == "json") {
    Json j = to_json(result);
    if (inv.method == "class") j["predicate"] = std::string(predicate_name(q.opts.predicate));
    if (check) {
      j["cross_check"] = {{"method", "brute"}, {"value", rational_json(check->value)},
                          {"agrees", agrees}};
    }
    out << j.dump(2) << '\n';
  } else if (inv.output == "csv") {
    out << "group,H,K,n,m,g,method,num,den\n";
    auto row = [&](const ExactProb& p) {
      out << q.group->name() << ',' << q.H.label() << ',' << q.K.label() << ',' << inv.n << ','
          << inv.m << ',' << *q.g << ',' << method_name(p.method) << ',' << p.numerator() << ','
          << p.denominator() << '\n';
    };
    row(result);
    if (check) row(*check);
  } else {
    write_table_header(out, q, inv);
    out << "  g " << *q.g << '\n';
    out << std::left << std::setw(14) << method_name(result.method) << to_string(result.value)
        << "  (" << fmt_double(to_double(result.value), 10) << ")\n";
    if (check) {
      out << std::setw(14) << "brute" << to_string(check->value)
          << (agrees ? "  agrees" : "  DISAGREES") << '\n';
    }
  }
  if (!agrees) {
    err << "error: distribution engine and brute force disagree\n";
    return kExitComputation;
  }
  return kExitOk;
}

int do_profile(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const Query q = resolve_query(inv);
  const auto& G = *q.group;
  std::vector<Rational> values(G.order());
  Method method = Method::Distribution;
  std::optional<bool> agrees;
  const BigInt total = tuple_count(q.H, q.K, inv.n, inv.m);
  if (inv.method == "brute") {
    method = Method::Brute;
    const auto d = brute_distribution(q.H, q.K, inv.n, inv.m, q.opts);
    for (ElementId x = 0; x < G.order(); ++x) values[x] = Rational(d.counts[x], total);
  } else if (inv.method == "class") {
    method = Method::ClassFormula;
    const auto xb = comm_distribution(q.H, inv.n, q.opts);
    CommParams params{q.H, q.K, inv.n, inv.m, 0};
    for (ElementId x = 0; x < G.order(); ++x) {
      params.g = x;
      values[x] = prob_class_formula_from(xb, params, q.opts).value;
    }
  } else {
    const auto profile = prob_profile(q.H, q.K, inv.n, inv.m, q.opts);
    for (ElementId x = 0; x < G.order(); ++x) values[x] = profile[x].value;
    if (inv.method == "auto" && total <= BigInt(q.opts.brute_cap)) {
      const auto d = brute_distribution(q.H, q.K, inv.n, inv.m, q.opts);
      agrees = true;
      for (ElementId x = 0; x < G.order(); ++x) {
        if (Rational(d.counts[x], total) != values[x]) agrees = false;
      }
    }
  }
  Rational sum = 0;
  for (const auto& v : values) sum += v;
  if (inv.output == "json") {
    Json j;
    j["group"] = G.name();
    j["H"] = q.H.label();
    j["K"] = q.K.label();
    j["n"] = inv.n;
    j["m"] = inv.m;
    j["method"] = std::string(method_name(method));
    if (method == Method::ClassFormula) {
      j["predicate"] = std::string(predicate_name(q.opts.predicate));
    }
    Json rows = Json::array();
    for (ElementId x = 0; x < G.order(); ++x) {
      rows.push_back({{"g", x}, {"label", G.label(x)}, {"value", rational_json(values[x])}});
    }
    j["profile"] = std::move(rows);
    j["sum"] = rational_json(sum);
    if (agrees) j["cross_check"] = {{"method", "brute"}, {"agrees", *agrees}};
    out << j.dump(2) << '\n';
  } else if (inv.output == "csv") {
    out << "g,num,den\n";
    for (ElementId x = 0; x < G.order(); ++x) {
      out << x << ',' << boost::multiprecision::numerator(values[x]) << ','
          << boost::multiprecision::denominator(values[x]) << '\n';
    }
  } else {
    write_table_header(out, q, inv);
    out << "  method " << method_name(method) << '\n';
    out << std::left << std::setw(6) << "g" << std::setw(16) << "value" << "label\n";
    for (ElementId x = 0; x < G.order(); ++x) {
      out << std::setw(6) << x << std::setw(16) << to_string(values[x]) << G.label(x) << '\n';
    }
    out << "sum " << to_string(sum) << '\n';
    if (agrees) out << "brute " << (*agrees ? "agrees" : "DISAGREES") << '\n';
  }
  if (agrees && !*agrees) {
    err << "error: distribution engine and brute force disagree\n";
    return kExitComputation;
  }
  return kExitOk;
}

int do_zeta(const Invocation& inv, std::ostream& out) {
  Query q = resolve_query(inv);
  if (!q.K.is_full()) throw UsageError("zeta counts over K = G; drop -K or pass -K full");
  CommParams params{q.H, q.K, inv.n, inv.m, 0};
  const auto dist = extend_by_conjugators(comm_distribution(q.H, inv.n, q.opts), q.K, inv.m, q.opts);
  std::vector<ElementId> targets;
  if (q.g) {
    targets.push_back(*q.g);
  } else {
    for (ElementId x = 0; x < q.group->order(); ++x) targets.push_back(x);
  }
  if (inv.output == "json") {
    Json j;
    j["group"] = q.group->name();
    j["H"] = q.H.label();
    j["n"] = inv.n;
    j["m"] = inv.m;
    Json rows = Json::array();
    for (auto x : targets) rows.push_back({{"g", x}, {"count", dist.counts[x].str()}});
    j["zeta"] = std::move(rows);
    out << j.dump(2) << '\n';
  } else if (inv.output == "csv") {
    out << "g,count\n";
    for (auto x : targets) out << x << ',' << dist.counts[x] << '\n';
  } else {
    out << "group " << q.group->name() << "  H " << q.H.label() << "  n " << inv.n << "  m "
        << inv.m << '\n';
    out << std::left << std::setw(6) << "g" << "zeta\n";
    for (auto x : targets) out << std::setw(6) << x << dist.counts[x] << '\n';
  }
  return kExitOk;
}

int do_dist(const Invocation& inv, std::ostream& out) {
  const Query q = resolve_query(inv);
  const auto dist = inv.x_block
                        ? comm_distribution(q.H, inv.n, q.opts)
                        : extend_by_conjugators(comm_distribution(q.H, inv.n, q.opts), q.K,
                                                inv.m, q.opts);
  if (inv.output == "json") {
    Json j;
    j["group"] = q.group->name();
    j["H"] = q.H.label();
    j["K"] = inv.x_block ? Json(nullptr) : Json(q.K.label());
    j["n"] = inv.n;
    j["m"] = inv.x_block ? 0u : inv.m;
    j["source"] = dist.source;
    j["total"] = dist.total().str();
    Json counts = Json::array();
    for (std::size_t x = 0; x < dist.counts.size(); ++x) {
      counts.push_back({{"element_id", x}, {"count", dist.counts[x].str()}});
    }
    j["counts"] = std::move(counts);
    out << j.dump(2) << '\n';
  } else if (inv.output == "csv") {
    out << to_csv(dist);
  } else {
    out << dist.source << "  total " << dist.total() << '\n';
    out << std::left << std::setw(6) << "id" << std::setw(14) << "count" << "label\n";
    for (std::size_t x = 0; x < dist.counts.size(); ++x) {
      out << std::setw(6) << x << std::setw(14) << dist.counts[x].str()
          << q.group->label(static_cast<ElementId>(x)) << '\n';
    }
  }
  return kExitOk;
}

int do_chartab(const Invocation& inv, std::ostream& out) {
  const auto group = resolve([&] { return parse_group_spec(inv.group, order_cap(inv)); });
  CharacterTable table;
  if (!inv.import_path.empty()) {
    const Json j = parse_json_file(inv.import_path);
    table = resolve([&] { return character_table_from_json(group, j); });
  } else {
    CharTableOptions copts;
    copts.seed = inv.seed;
    table = character_table(group, copts);
  }
  if (inv.output == "json") {
    out << to_json(table).dump(2) << '\n';
  } else if (inv.output == "csv") {
    out << "chi,degree";
    for (std::size_t c = 0; c < table.num_classes(); ++c) out << ",class" << c;
    out << '\n';
    for (std::size_t i = 0; i < table.irreducibles.size(); ++i) {
      out << i << ',' << table.degrees[i];
      for (auto z : table.irreducibles[i].values) out << ',' << complex_text(z);
      out << '\n';
    }
  } else {
    const auto report = verify_orthogonality(table);
    out << "group " << group->name() << "  order " << group->order() << "  classes "
        << table.num_classes() << '\n';
    out << std::left << std::setw(8) << "class";
    for (std::size_t c = 0; c < table.num_classes(); ++c) out << std::setw(12) << c;
    out << '\n' << std::setw(8) << "size";
    for (auto s : table.class_sizes) out << std::setw(12) << s;
    out << '\n' << std::setw(8) << "rep";
    for (auto r : table.class_reps) out << std::setw(12) << r;
    out << '\n';
    for (std::size_t i = 0; i < table.irreducibles.size(); ++i) {
      out << std::setw(8) << ("chi" + std::to_string(i));
      for (auto z : table.irreducibles[i].values) out << std::setw(12) << complex_text(z);
      out << '\n';
    }
    out << "orthogonality deviation rows " << fmt_double(report.row_deviation, 3) << ", columns "
        << fmt_double(report.column_deviation, 3) << '\n';
  }
  return kExitOk;
}

std::vector<std::string> split_claims(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  return out;
}

int do_audit(const Invocation& inv, std::ostream& out, std::ostream& err) {
  Json j = inv.config.empty() ? Json::object() : parse_json_file(inv.config);
  if (!j.is_object()) throw UsageError("--config: expected a JSON object");
  if (!inv.groups.empty()) j["groups"] = inv.groups;
  if (!inv.battery.empty() && inv.groups.empty()) j["groups"] = "default";
  if (!inv.claims.empty()) {
    Json claims = Json::array();
    for (const auto& c : split_claims(inv.claims)) {
      if (!parse_claim(c)) throw UsageError("--claims: unknown claim '" + c + "'");
      claims.push_back(c);
    }
    j["claims"] = std::move(claims);
  }
  if (inv.seed_given) j["seed"] = inv.seed;
  if (!inv.emit.empty()) j["emit"] = inv.emit;
  if (inv.timings) j["timings"] = true;
  if (inv.threads_given) j["threads"] = inv.threads;
  if (inv.n) j["n"] = Json::array({inv.n});
  if (inv.m) j["m"] = Json::array({inv.m});
  if (inv.brute_cap) j["brute_cap"] = *inv.brute_cap;
  if (!j.contains("max_order")) j["max_order"] = order_cap(inv);
  const AuditConfig config = resolve([&] { return audit_config_from_json(j); });
  const AuditReport report = resolve([&] { return run_battery(config); });

  if (inv.output == "json") {
    out << to_json(report).dump(2) << '\n';
  } else if (inv.output == "csv") {
    out << to_csv(report);
  } else {
    out << std::left << std::setw(28) << "claim" << std::setw(10) << "holds" << std::setw(10)
        << "violated" << std::setw(10) << "vacuous" << "precondition_failed\n";
    for (const auto& [key, c] : report.summary) {
      out << std::setw(28) << key << std::setw(10) << c.holds << std::setw(10) << c.violated
          << std::setw(10) << c.vacuous << c.precondition_failed << '\n';
    }
    std::size_t shown = 0;
    for (const auto& f : report.findings) {
      if (f.verdict != Verdict::Violated) continue;
      if (shown++ == 0) out << "\nviolations\n";
      out << "  " << f.key() << "  " << f.instance.group << "  H=" << f.instance.H
          << " K=" << f.instance.K << " n=" << f.instance.n << " m=" << f.instance.m;
      if (f.instance.g) out << " g=" << *f.instance.g;
      if (!f.instance.extra.empty()) out << " " << f.instance.extra;
      out << "  " << f.witness.lhs << ' ' << f.witness.relation << ' ' << f.witness.rhs << '\n';
    }
  }
  const int code = audit_exit_code(report);
  if (code == kExitHardViolation) err << "hard-guarantee claim violated\n";
  return code;
}

}  // namespace

int audit_exit_code(const AuditReport& report) {
  return report.hard_guarantee_violated() ? kExitHardViolation : kExitOk;
}

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const auto& s = inv.subcommand;
  if (s == "info") return do_info(inv, out);
  if (s == "prob") return do_prob(inv, out, err);
  if (s == "profile") return do_profile(inv, out, err);
  if (s == "zeta") return do_zeta(inv, out);
  if (s == "dist") return do_dist(inv, out);
  if (s == "chartab") return do_chartab(inv, out);
  if (s == "audit") return do_audit(inv, out, err);
  throw UsageError("unknown subcommand '" + s + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const Invocation inv = parse(args);
    return execute(inv, out, err);
  } catch (const HelpRequested& e) {
    out << e.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
}

}  // namespace commdeg::cli
