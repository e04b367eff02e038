#include <dropstyle/errors.hpp>
#include <dropstyle/pipeline.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace dropstyle
{
	using nlohmann::json;

	void PipelineConfig::validate() const
	{
		style.validate();
		schedule.validate();
		sim.validate();
		if (!(voxel_size >= 0.0) || !std::isfinite(voxel_size))
			throw DomainError("voxel size must be >= 0 (0 = automatic)");
		if (!(safety_lambda > 0.0 && safety_lambda <= 1.0))
			throw DomainError("safety factor must lie in (0, 1]");
		if (is_temporal(schedule.strategy) && schedule.sim_budget > style.iterations)
			throw DomainError("sim budget exceeds the iteration count");
	}

	Material PipelineConfig::resolve_material() const
	{
		if (material_override)
			return *material_override;
		return material_lookup(material, materials_file);
	}

	std::array<double, 3> heatmap_color(double s_norm)
	{
		// blue, cyan, green, yellow, red over [0, 1]; red darkens up to 1.5, then holds
		static constexpr double stops[6][3] = {{0, 0, 1}, {0, 1, 1}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}, {0.5, 0, 0}};
		const double t = std::isfinite(s_norm) ? std::clamp(s_norm, 0.0, 1.5) : 1.5;
		const double x = t <= 1.0 ? t * 4.0 : 4.0 + (t - 1.0) * 2.0;
		const int k = std::min(4, static_cast<int>(x));
		const double f = x - k;
		std::array<double, 3> c;
		for (int i = 0; i < 3; ++i)
			c[i] = stops[k][i] + f * (stops[k + 1][i] - stops[k][i]);
		return c;
	}

	std::vector<Vec3> heatmap_colors(const NormalizedStress &sn)
	{
		std::vector<Vec3> out(sn.size());
		for (std::size_t v = 0; v < sn.size(); ++v)
		{
			const auto c = heatmap_color(sn[v]);
			out[v] = Vec3(c[0], c[1], c[2]);
		}
		return out;
	}

	namespace
	{
		using Clock = std::chrono::steady_clock;

		double seconds_since(Clock::time_point t0)
		{
			return std::chrono::duration<double>(Clock::now() - t0).count();
		}

		struct SimOutcome
		{
			std::vector<double> vertex_vm;
			std::size_t tets = 0;
			double max_element = 0.0;
		};

		class Loop
		{
		public:
			Loop(const SurfaceMesh &mesh, const PipelineConfig &cfg)
				: cfg_(cfg), mesh_(mesh), material_(cfg.resolve_material()),
				  criterion_(FailureCriterion::make(material_, cfg.safety_lambda)),
				  control_(cfg.control)
			{
				const double diag = bbox_diagonal(mesh_);
				voxel_size_ = cfg.voxel_size > 0.0 ? cfg.voxel_size : diag / 40.0;
				// every re-mesh reuses the unstyled model's lattice
				anchor_ = bounding_box(mesh_.vertices).min;
				if (!(voxel_size_ > 0.0))
					throw ResolutionError("cannot pick a voxel size for a mesh with zero extent");
			}

			PipelineResult run()
			{
				const auto t_start = Clock::now();
				const int n = cfg_.style.iterations;
				const ScheduleStrategy strategy = cfg_.schedule.strategy;

				std::vector<int> planned;
				if (strategy == ScheduleStrategy::linear_temporal)
					planned = temporal_schedule(n, cfg_.schedule.sim_budget, TemporalShape::linear);
				else if (strategy == ScheduleStrategy::quadratic_temporal)
					planned = temporal_schedule(n, cfg_.schedule.sim_budget, TemporalShape::quadratic);

				auto t0 = Clock::now();
				StyleTarget target = style_field(mesh_, cfg_.style);
				times_.stylize += seconds_since(t0);

				simulate_and_update(0, "baseline", n == 0);
				baseline_max_ = max_of(vertex_vm_);
				control_.frozen_threshold = baseline_max_ > 0.0 ? baseline_max_ : std::numeric_limits<double>::min();
				refresh_feedback(strategy);

				state_.delta.assign(mesh_.num_vertices(), 0.0);
				auto next_planned = planned.begin();
				for (int i = 1; i <= n; ++i)
				{
					t0 = Clock::now();
					const std::vector<Vec3> normals = vertex_normals(mesh_);
					const DisplacementField masked = apply_mask(displacement_step(target, i, cfg_.style), mask_);
					mesh_ = apply_displacement(mesh_, masked, normals);
					for (std::size_t v = 0; v < masked.size(); ++v)
					{
						target.achieved[v] += masked[v];
						state_.delta[v] += std::abs(masked[v]);
					}
					times_.stylize += seconds_since(t0);

					const char *reason = nullptr;
					if (i == n)
						reason = "final";
					else if (is_temporal(strategy))
					{
						if (next_planned != planned.end() && *next_planned == i)
							reason = "schedule";
					}
					else if (strategy == ScheduleStrategy::geometry ? geometry_trigger(state_, thickness_, cfg_.schedule.geometry_fraction)
																	 : stress_trigger(state_))
						reason = "trigger";
					while (next_planned != planned.end() && *next_planned <= i)
						++next_planned;

					if (!reason)
						continue;
					simulate_and_update(i, reason, i == n);
					if (i < n)
						refresh_feedback(strategy);
					state_.reset_delta();
					state_.last_sim = i;
				}

				PipelineResult result;
				RunReport &rep = result.report;
				const Verdict verdict = viability_verdict(vertex_vm_, material_);
				const NormalizedStress sn = normalized_stress(vertex_vm_, criterion_.sigma_c);
				rep.verdict = verdict.viability;
				rep.max_stress = verdict.max_stress;
				rep.worst_vertex = verdict.worst_vertex;
				rep.baseline_max_stress = baseline_max_;
				rep.sigma_c = criterion_.sigma_c;
				rep.yield_strength = material_.yield_strength;
				rep.sims = records_;
				for (const SimRecord &r : records_)
					rep.scheduled_iterations.push_back(r.iteration);
				rep.sim_count = static_cast<int>(records_.size());
				rep.loop_sim_count = rep.sim_count - 1;
				rep.style_attainment = style_attainment(target);
				rep.final_s_norm = sn.values;
				rep.config_echo = to_json(cfg_);
				rep.config_echo["material_constants"] = {
					{"name", material_.name},
					{"E", material_.young_modulus},
					{"nu", material_.poisson_ratio},
					{"yield", material_.yield_strength},
					{"density", material_.density}};
				rep.config_echo["resolved_voxel_size"] = voxel_size_;
				times_.total = seconds_since(t_start);
				rep.wall_time = times_;

				result.mesh = std::move(mesh_);
				result.mesh.colors = heatmap_colors(sn);
				result.style = std::move(target);
				spdlog::info("run finished: {} (max {:.4g} Pa, sigma_c {:.4g} Pa, {} simulations, attainment {:.4f})",
							 to_string(rep.verdict), rep.max_stress, rep.sigma_c, rep.sim_count, rep.style_attainment);
				return result;
			}

		private:
			static double max_of(const std::vector<double> &v)
			{
				return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
			}

			void simulate_and_update(int iteration, const char *reason, bool last)
			{
				try
				{
					auto t0 = Clock::now();
					TetMesh tm = voxel_tetrahedralize(mesh_, voxel_size_, anchor_);
					if (cfg_.snap_boundary)
						tm = snap_boundary_to_surface(std::move(tm), mesh_, voxel_size_);
					const Correspondence corr = build_correspondence(mesh_, tm);
					times_.mesh += seconds_since(t0);

					t0 = Clock::now();
					SimConfig sim = cfg_.sim;
					if (!last)
						sim.trace_path.reset();
					const StressField sf = drop_test(tm, material_, sim);
					vertex_vm_ = element_to_vertex_stress(sf, tm, corr);
					times_.simulate += seconds_since(t0);

					SimRecord rec;
					rec.iteration = iteration;
					rec.reason = reason;
					rec.tets = tm.num_tets();
					rec.max_vertex_stress = max_of(vertex_vm_);
					rec.max_element_stress = max_of(sf.per_element_max_vm);
					records_.push_back(rec);
					spdlog::info("simulation at iteration {} ({}): {} tets, max vertex stress {:.4g} Pa",
								 iteration, reason, rec.tets, rec.max_vertex_stress);
				}
				catch (const StageError &)
				{
					throw;
				}
				catch (const Error &e)
				{
					throw StageError(iteration, e.what());
				}
			}

			void refresh_feedback(ScheduleStrategy strategy)
			{
				const NormalizedStress sn = normalized_stress(vertex_vm_, criterion_.sigma_c);
				mask_ = compute_mask(control_, sn, vertex_vm_);
				if (is_temporal(strategy))
					return;
				const auto t0 = Clock::now();
				thickness_ = local_thickness(mesh_);
				times_.thickness += seconds_since(t0);
				if (strategy == ScheduleStrategy::stress)
					state_.thresholds = stress_thresholds(thickness_, sn, cfg_.schedule.geometry_fraction, cfg_.schedule.stress_floor);
			}

			const PipelineConfig &cfg_;
			SurfaceMesh mesh_;
			Material material_;
			FailureCriterion criterion_;
			ControlConfig control_;
			double voxel_size_ = 0.0;
			Vec3 anchor_ = Vec3::Zero();
			double baseline_max_ = 0.0;

			std::vector<double> vertex_vm_;
			MaskField mask_;
			ThicknessField thickness_;
			ScheduleState state_;
			std::vector<SimRecord> records_;
			PhaseTimes times_;
		};
	} // namespace

	PipelineResult run_pipeline(const SurfaceMesh &mesh, const PipelineConfig &cfg)
	{
		cfg.validate();
		mesh.validate();
		return Loop(mesh, cfg).run();
	}

	json to_json(const PipelineConfig &cfg)
	{
		json j;
		j["material"] = cfg.material_override ? cfg.material_override->name : cfg.material;
		j["safety_lambda"] = cfg.safety_lambda;
		j["voxel_size"] = cfg.voxel_size;
		j["snap_boundary"] = cfg.snap_boundary;
		j["control"] = to_string(cfg.control.strategy);
		j["schedule"] = to_string(cfg.schedule.strategy);
		j["sim_budget"] = cfg.schedule.sim_budget;
		j["geometry_fraction"] = cfg.schedule.geometry_fraction;
		j["stress_floor"] = cfg.schedule.stress_floor;
		j["iterations"] = cfg.style.iterations;
		j["seed"] = cfg.style.seed;
		j["amplitude"] = cfg.style.amplitude;
		j["frequency"] = cfg.style.frequency;
		j["octaves"] = cfg.style.octaves;
		j["per_iter_cap"] = cfg.style.per_iter_cap;
		j["drop_height"] = cfg.sim.drop_height;
		j["gravity"] = cfg.sim.gravity;
		j["up"] = {cfg.sim.up.x(), cfg.sim.up.y(), cfg.sim.up.z()};
		j["dt"] = cfg.sim.dt;
		j["dt_safety"] = cfg.sim.dt_safety;
		j["sim_duration"] = cfg.sim.duration;
		j["contact_depth"] = cfg.sim.contact_depth;
		j["damping"] = cfg.sim.damping;
		j["start_gap"] = cfg.sim.start_gap;
		return j;
	}

	json to_json(const RunReport &r)
	{
		json j;
		j["verdict"] = to_string(r.verdict);
		j["max_stress"] = r.max_stress;
		j["worst_vertex"] = r.worst_vertex;
		j["baseline_max_stress"] = r.baseline_max_stress;
		j["sigma_c"] = r.sigma_c;
		j["yield_strength"] = r.yield_strength;
		j["sim_count"] = r.sim_count;
		j["loop_sim_count"] = r.loop_sim_count;
		j["scheduled_iterations"] = r.scheduled_iterations;
		json sims = json::array();
		for (const SimRecord &s : r.sims)
			sims.push_back({{"iteration", s.iteration},
							{"reason", s.reason},
							{"tets", s.tets},
							{"max_vertex_stress", s.max_vertex_stress},
							{"max_element_stress", s.max_element_stress}});
		j["simulations"] = std::move(sims);
		j["wall_time"] = {{"stylize", r.wall_time.stylize},
						  {"mesh", r.wall_time.mesh},
						  {"simulate", r.wall_time.simulate},
						  {"thickness", r.wall_time.thickness},
						  {"total", r.wall_time.total}};
		j["style_attainment"] = r.style_attainment;
		j["config"] = r.config_echo;
		j["final_s_norm"] = r.final_s_norm;
		return j;
	}

	std::string report_to_string(const RunReport &report)
	{
		return to_json(report).dump(2) + "\n";
	}
} // namespace dropstyle
