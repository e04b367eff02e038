#include <doctest.h>

#include <dropstyle/errors.hpp>
#include <dropstyle/pipeline.hpp>
#include <shapes.hpp>

#include <cmath>

using namespace dropstyle;

namespace
{
	// small and fast: ~200 tets, a short stiff-contact drop
	PipelineConfig quick(ControlStrategy control, ScheduleStrategy schedule)
	{
		PipelineConfig cfg;
		cfg.voxel_size = 0.01;
		cfg.style.iterations = 20;
		cfg.style.amplitude = 0.01;
		cfg.style.seed = 3;
		cfg.control.strategy = control;
		cfg.schedule.strategy = schedule;
		cfg.schedule.sim_budget = 4;
		cfg.sim.contact_depth = 1e-7;
		cfg.sim.duration = 2e-4;
		cfg.sim.start_gap = 1e-5;
		return cfg;
	}

	SurfaceMesh block()
	{
		return test::beam(6, 3, 2, 0.01, 2);
	}

	nlohmann::json without_times(const RunReport &r)
	{
		nlohmann::json j = to_json(r);
		j.erase("wall_time");
		return j;
	}
} // namespace

TEST_CASE("thick block with no control reaches the full style")
{
	const SurfaceMesh mesh = block();
	const PipelineResult res = run_pipeline(mesh, quick(ControlStrategy::none, ScheduleStrategy::linear_temporal));
	const RunReport &r = res.report;
	CHECK(r.verdict == Viability::viable);
	CHECK(r.style_attainment >= 0.999);
	CHECK(r.sim_count == 5);
	CHECK(r.loop_sim_count == 4);
	CHECK(r.scheduled_iterations == std::vector<int>{0, 5, 10, 15, 20});
	CHECK(static_cast<int>(r.scheduled_iterations.size()) == r.sim_count);
	CHECK(r.sims.front().reason == "baseline");
	CHECK(r.sims.back().reason == "final");
	CHECK(r.sigma_c == doctest::Approx(0.2 * 45.6e6));
	CHECK(r.baseline_max_stress > 0.0);
	CHECK(r.final_s_norm.size() == res.mesh.num_vertices());
	CHECK(res.mesh.num_vertices() == mesh.num_vertices());
	CHECK(res.mesh.faces == mesh.faces);

	// colors follow the final normalized stress
	REQUIRE(res.mesh.colors.size() == mesh.num_vertices());
	for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
	{
		const auto c = heatmap_color(r.final_s_norm[v]);
		CHECK(res.mesh.colors[v] == Vec3(c[0], c[1], c[2]));
	}

	// echo carries the resolved material
	CHECK(r.config_echo["material_constants"]["yield"] == 45.6e6);
	CHECK(r.config_echo["material_constants"]["E"] == 3.5e9);
	CHECK(r.config_echo["control"] == "none");
	CHECK(r.config_echo["resolved_voxel_size"] == 0.01);
}

TEST_CASE("near-zero amplitude leaves the mesh in place")
{
	const SurfaceMesh mesh = block();
	PipelineConfig cfg = quick(ControlStrategy::linear, ScheduleStrategy::quadratic_temporal);
	cfg.style.amplitude = 1e-9;
	const PipelineResult res = run_pipeline(mesh, cfg);
	const double diag = bbox_diagonal(mesh);
	for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
		CHECK((res.mesh.vertices[v] - mesh.vertices[v]).norm() <= 1e-8 * diag);
	CHECK(res.report.loop_sim_count == cfg.schedule.sim_budget);
	CHECK(res.report.scheduled_iterations == std::vector<int>{0, 1, 5, 11, 20});
}

TEST_CASE("attainment extremes")
{
	const SurfaceMesh mesh = block();
	// a vanishing safety factor puts every vertex past the critical stress: mask 0
	PipelineConfig cfg = quick(ControlStrategy::linear, ScheduleStrategy::linear_temporal);
	cfg.safety_lambda = 1e-9;
	const PipelineResult res = run_pipeline(mesh, cfg);
	CHECK(res.report.style_attainment == 0.0);
	for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
		CHECK(res.mesh.vertices[v] == mesh.vertices[v]);
	CHECK(res.report.verdict == Viability::viable); // verdict uses the yield strength, not sigma_c
}

TEST_CASE("controls never displace further than no control")
{
	const SurfaceMesh mesh = block();
	PipelineConfig base = quick(ControlStrategy::none, ScheduleStrategy::stress);
	base.style.amplitude = 0.03;
	base.safety_lambda = 0.01; // puts the masks in their active range on this stiff block
	const PipelineResult free = run_pipeline(mesh, base);
	CHECK(free.report.style_attainment >= 0.999);
	for (ControlStrategy c : {ControlStrategy::linear, ControlStrategy::exponential, ControlStrategy::frozen})
	{
		CAPTURE(to_string(c));
		PipelineConfig cfg = base;
		cfg.control.strategy = c;
		const PipelineResult res = run_pipeline(mesh, cfg);
		CHECK(res.report.style_attainment <= free.report.style_attainment + 1e-12);
		CHECK(res.report.sim_count >= 2);
		for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
			CHECK(std::abs(res.style.achieved[v]) <= std::abs(free.style.achieved[v]) + 1e-15);
	}
}

TEST_CASE("adaptive schedules keep the invariants")
{
	const SurfaceMesh mesh = block();
	for (ScheduleStrategy s : {ScheduleStrategy::geometry, ScheduleStrategy::stress})
	{
		CAPTURE(to_string(s));
		const RunReport r = run_pipeline(mesh, quick(ControlStrategy::exponential, s)).report;
		CHECK(r.sim_count >= 2);
		CHECK(r.loop_sim_count == r.sim_count - 1);
		REQUIRE(static_cast<int>(r.scheduled_iterations.size()) == r.sim_count);
		CHECK(r.scheduled_iterations.front() == 0);
		CHECK(r.scheduled_iterations.back() == 20);
		for (std::size_t k = 1; k < r.scheduled_iterations.size(); ++k)
			CHECK(r.scheduled_iterations[k] > r.scheduled_iterations[k - 1]);
		// low amplitude: the adaptive schedules stay within the temporal budget
		CHECK(r.sim_count <= 10);
	}
}

TEST_CASE("runs are deterministic apart from wall times")
{
	const SurfaceMesh mesh = block();
	const PipelineConfig cfg = quick(ControlStrategy::frozen, ScheduleStrategy::stress);
	const RunReport a = run_pipeline(mesh, cfg).report, b = run_pipeline(mesh, cfg).report;
	CHECK(without_times(a).dump() == without_times(b).dump());
	CHECK(to_json(a).contains("wall_time"));
}

TEST_CASE("configuration and stage errors")
{
	const SurfaceMesh mesh = block();
	PipelineConfig cfg = quick(ControlStrategy::none, ScheduleStrategy::linear_temporal);
	cfg.schedule.sim_budget = 21;
	CHECK_THROWS_AS(run_pipeline(mesh, cfg), DomainError);
	cfg = quick(ControlStrategy::none, ScheduleStrategy::linear_temporal);
	cfg.safety_lambda = 1.5;
	CHECK_THROWS_AS(run_pipeline(mesh, cfg), DomainError);
	cfg = quick(ControlStrategy::none, ScheduleStrategy::linear_temporal);
	cfg.voxel_size = -1.0;
	CHECK_THROWS_AS(run_pipeline(mesh, cfg), DomainError);

	// a failing simulation names the iteration it happened at
	cfg = quick(ControlStrategy::none, ScheduleStrategy::linear_temporal);
	cfg.sim.dt = 1.0;
	try
	{
		run_pipeline(mesh, cfg);
		FAIL("expected a stage error");
	}
	catch (const StageError &e)
	{
		CHECK(e.iteration() == 0);
	}

	// voxels coarser than the model leave nothing to mesh
	cfg = quick(ControlStrategy::none, ScheduleStrategy::linear_temporal);
	cfg.voxel_size = 0.5;
	CHECK_THROWS_AS(run_pipeline(mesh, cfg), StageError);
}

TEST_CASE("heatmap ramp")
{
	using C = std::array<double, 3>;
	CHECK(heatmap_color(0.0) == C{0, 0, 1});
	CHECK(heatmap_color(0.25) == C{0, 1, 1});
	CHECK(heatmap_color(0.5) == C{0, 1, 0});
	CHECK(heatmap_color(0.75) == C{1, 1, 0});
	CHECK(heatmap_color(1.0) == C{1, 0, 0});
	CHECK(heatmap_color(1.25) == C{0.75, 0, 0});
	CHECK(heatmap_color(1.5) == C{0.5, 0, 0});
	CHECK(heatmap_color(7.0) == C{0.5, 0, 0});
	CHECK(heatmap_color(-1.0) == C{0, 0, 1});
	CHECK(heatmap_color(std::nan("")) == C{0.5, 0, 0});
	// at and past the critical stress only red is left
	for (double s : {1.0, 1.1, 1.4, 3.0})
	{
		const C c = heatmap_color(s);
		CHECK(c[0] >= 0.5);
		CHECK(c[1] == 0.0);
		CHECK(c[2] == 0.0);
	}
	// red rises and blue falls below the critical stress
	double r = -1, b = 2;
	for (int k = 0; k <= 100; ++k)
	{
		const C c = heatmap_color(k / 100.0);
		CHECK(c[0] >= r);
		CHECK(c[2] <= b);
		r = c[0];
		b = c[2];
	}
}
