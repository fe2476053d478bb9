#include <doctest.h>

#include "config.hpp"
#include "experiments.hpp"

#include <filesystem>
#include <set>

using namespace thermeq::cli;
using nlohmann::json;

TEST_CASE("config round trip") {
    const std::string text = R"({
        "experiment": "example2-alignment", "seed": 17, "n_sites": 8, "cell_size": 2,
        "model": {"w": 1.5, "periodic": true},
        "shell": {"quantile_lo": 0.25, "quantile_hi": 0.75},
        "tolerances": {"epsilon": 0.2, "delta": 0.05},
        "samples": 100, "resolution": 1.0, "output": {"dir": "out/x"}
    })";
    const ExperimentConfig c = parse_config_text(text);
    CHECK(c.experiment == "example2-alignment");
    CHECK(c.seed == 17);
    CHECK(c.n_sites == 8);
    CHECK(c.w_or(0.0) == 1.5);
    CHECK(c.j_or(0.3) == 0.3);
    CHECK(c.periodic_or(false));
    CHECK(c.epsilon_or(0.0) == 0.2);
    CHECK(c.eps_tilde_or(0.4) == 0.4);
    CHECK(c.output_dir == "out/x");
    CHECK(parse_config(to_json(c)) == c);

    const ExperimentConfig cells = parse_config_text(R"({"experiment": "x", "seed": 0, "cells": [[0, 1], [2]]})");
    REQUIRE(cells.cells);
    CHECK(cells.cells->size() == 2);
    CHECK(parse_config(to_json(cells)) == cells);
    CHECK(to_json(parse_config_text(R"({"experiment": "x", "seed": 3})")).size() == 2);
}

TEST_CASE("config rejects bad input") {
    const auto bad = [](const std::string& t) { CHECK_THROWS_AS(parse_config_text(t), ConfigError); };
    bad("not json");
    bad("[]");
    bad(R"({"seed": 1})");
    bad(R"({"experiment": "moments"})");
    bad(R"({"experiment": "moments", "seed": -1})");
    bad(R"({"experiment": "moments", "seed": 1.5})");
    bad(R"({"experiment": "moments", "seed": 1, "bogus": 2})");
    bad(R"({"experiment": "moments", "seed": 1, "model": {"w": 1, "h": 2}})");
    bad(R"({"experiment": "moments", "seed": 1, "n_sites": 17})");
    bad(R"({"experiment": "moments", "seed": 1, "n_sites": 0})");
    bad(R"({"experiment": "moments", "seed": 1, "cells": [[0]], "cell_size": 1})");
    bad(R"({"experiment": "moments", "seed": 1, "cells": []})");
    bad(R"({"experiment": "moments", "seed": 1, "model": {"w": -1}})");
    bad(R"({"experiment": "moments", "seed": 1, "model": {"periodic": 1}})");
    bad(R"({"experiment": "moments", "seed": 1, "shell": {"e": 1}})");
    bad(R"({"experiment": "moments", "seed": 1, "shell": {"e": 1, "delta_e": 0}})");
    bad(R"({"experiment": "moments", "seed": 1, "shell": {"quantile_lo": 0.5, "quantile_hi": 0.4}})");
    bad(R"({"experiment": "moments", "seed": 1, "shell": {"e": 1, "delta_e": 1, "quantile_lo": 0, "quantile_hi": 1}})");
    bad(R"({"experiment": "moments", "seed": 1, "tolerances": {"delta": 0}})");
    bad(R"({"experiment": "moments", "seed": 1, "tolerances": {"epsilon": 2.5}})");
    bad(R"({"experiment": "moments", "seed": 1, "samples": 0})");
    bad(R"({"experiment": "moments", "seed": 1, "resolution": -1})");
    bad(R"({"experiment": "moments", "seed": 1, "t_max": 0})");
    bad(R"({"experiment": "moments", "seed": 1, "output": {"dir": 3}})");
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
    CHECK_FALSE(schema_description().empty());
}

TEST_CASE("registry") {
    const auto& reg = registry();
    CHECK(reg.size() == 21);
    CHECK(reg.front().name == "example1-product-mate-not-mite");
    std::set<std::string> names;
    for (const auto& e : reg) {
        CHECK(names.insert(e.name).second);
        CHECK_FALSE(e.topic.empty());
        CHECK(find_experiment(e.name) == &e);
    }
    for (const char* n : {"example2-alignment", "estimates", "time-variance", "gap-mite-probe"}) CHECK(names.count(n));
    CHECK(find_experiment("nope") == nullptr);
    CHECK(find_experiment("gap-mite-probe")->anchors.empty());

    ExperimentConfig c;
    c.experiment = "nope";
    CHECK_THROWS_AS(run_experiment(c, {}), ConfigError);
}

TEST_CASE("shipped configs parse and name registered experiments") {
    std::set<std::string> seen;
    for (const auto& f : std::filesystem::directory_iterator(THERMEQ_CONFIG_DIR)) {
        if (f.path().extension() != ".json") continue;
        const ExperimentConfig c = load_config(f.path().string());
        CHECK(find_experiment(c.experiment) != nullptr);
        CHECK(f.path().stem().string() == c.experiment);
        seen.insert(c.experiment);
    }
    CHECK(seen.size() == registry().size());
}

TEST_CASE("runs are deterministic and independent of the job count") {
    ExperimentConfig c;
    c.experiment = "moments";
    c.seed = 5;
    c.dim = 4;
    c.samples = 3000;
    const auto a = run_experiment(c, {1});
    const auto b = run_experiment(c, {3});
    CHECK(results_document(c, a).dump() == results_document(c, b).dump());
    CHECK(all_passed(a));

    ExperimentConfig e;
    e.experiment = "example1-product-mate-not-mite";
    e.seed = 1;
    const auto out = run_experiment(e, {});
    const json doc = results_document(e, out);
    CHECK(doc.at("experiment") == e.experiment);
    CHECK(doc.at("passed") == all_passed(out));
    CHECK(doc.at("assertions").size() == out.assertions.size());
    for (const auto& row : doc.at("assertions")) {
        const auto& anchors = find_experiment(e.experiment)->anchors;
        CHECK(std::find(anchors.begin(), anchors.end(), row.at("anchor").get<std::string>()) != anchors.end());
    }
    CHECK(doc.at("config") == to_json(e));
    c.seed = 6;
    CHECK(results_document(c, run_experiment(c, {1})).dump() != results_document(c, a).dump());
}

TEST_CASE("csv numbers") {
    CHECK(csv_number(0.5) == "0.5");
    CHECK(csv_number(1e-20) == "1e-20");
    CHECK(csv_number(0.1) == "0.1");
    CHECK(std::stod(csv_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(csv_number(std::nan("")) == "nan");
    CHECK(csv_number(-INFINITY) == "-inf");
}
