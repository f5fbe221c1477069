#include "support.hpp"

#include "cfo/errors.hpp"
#include "cfo/io.hpp"
#include "cfo/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace cfo;
using namespace cfo::test;

TEST_CASE("instance documents round-trip") {
    ScenarioSpec spec;
    spec.nodes = 6;
    Instance a = generate(spec);
    std::string text = instance_to_json(a);
    Instance b = instance_from_json(text);
    CHECK(instance_to_json(b) == text);
    CHECK(b.graph.edge_count() == a.graph.edge_count());
    CHECK(b.params.deadline_h == a.params.deadline_h);
    CHECK(b.stations.size() == a.stations.size());
}

TEST_CASE("plan documents round-trip") {
    Instance inst = line3(400.0, 0.39, 9.5, 2);
    Plan p;
    p.stages = {{{0}, {4.0}}, {{1}, {4.5}}, {}};
    Stop s;
    s.node = 1;
    s.arrival = 4.0;
    s.soc = 430.0;
    s.wait = 0.1;
    s.charge = 0.3;
    Stop d;
    d.node = 2;
    d.kind = StopKind::Destination;
    d.arrival = 8.9;
    d.soc = 300.0;
    p.stops = {s, d};
    p.destination_arrival = 8.9;
    p.destination_soc = 300.0;
    PlanSummary sum = evaluate(p, inst);
    Plan q = plan_from_json(plan_to_json(p, &sum));
    CHECK(plan_to_json(q) == plan_to_json(p));
    CHECK(q.stops[1].kind == StopKind::Destination);
}

TEST_CASE("malformed documents") {
    CHECK_THROWS_AS((void)instance_from_json("{"), ParseError);
    CHECK_THROWS_AS((void)instance_from_json("{\"nodes\": 3}"), ParseError);
    CHECK_THROWS_AS((void)plan_from_json("[1, 2]"), ParseError);
    CHECK_THROWS_AS((void)load_instance("/nonexistent/instance.json"), ParseError);
}

TEST_CASE("summary csv") {
    std::ostringstream out;
    PlanSummary s;
    s.carbon_kg = 1.5;
    s.feasible = true;
    write_summary_csv(out, {s});
    CHECK(out.str().rfind("carbon_kg,energy_kwh,distance,time_h,feasible\n", 0) == 0);
}

TEST_CASE("intensity traces load from column files next to the instance") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "cfo_io_trace";
    fs::create_directories(dir);
    write_text_file((dir / "trace.txt").string(), "# hours kg/kWh\n0 0.8\n6 0.2\n\n48 0.5\n");
    Instance inst = line3(400.0, 0.39, 9.5, 1);
    std::string text = instance_to_json(inst);
    auto at = text.find("\"intensity\"");
    REQUIRE(at != std::string::npos);
    // swap the inline trace for a file reference
    auto close = text.find('}', at);
    text.replace(at, close - at + 1, "\"intensity_file\": \"trace.txt\"");
    Instance loaded = instance_from_json(text, dir.string());
    const IntensitySignal& s = loaded.stations[0].intensity;
    CHECK(intensity_at(s, 3.0) == doctest::Approx(0.5));
    CHECK(loaded.stations[0].intensity_file == "trace.txt");
    CHECK(instance_to_json(loaded).find("\"intensity_file\": \"trace.txt\"") != std::string::npos);
    CHECK_THROWS_AS((void)instance_from_json(text, "/nonexistent"), ParseError);
    fs::remove_all(dir);
}
