// dropstyle command line: every stage on its own plus the full loop and the batch grid.

#include <dropstyle/batch.hpp>
#include <dropstyle/errors.hpp>
#include <dropstyle/pipeline.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

using namespace dropstyle;
using nlohmann::json;

namespace
{
	constexpr int exit_domain = 1;
	constexpr int exit_usage = 2;

	std::string key_of(const std::string &flag)
	{
		std::string k = flag;
		std::replace(k.begin(), k.end(), '-', '_');
		return k;
	}

	/// Flags of one subcommand, each mirrored by a key in the flat JSON config.
	class FlagSet
	{
	public:
		explicit FlagSet(CLI::App *app) : app_(app)
		{
			app_->add_option("--config", config_path_, "JSON file with flag values; flags given here win");
			app_->add_flag("--dump-config", dump_, "print the merged settings as JSON and exit");
		}

		template <class T>
		CLI::Option *add(const std::string &flag, T &var, const std::string &help)
		{
			CLI::Option *opt = app_->add_option("--" + flag, var, help);
			if constexpr (!std::is_same_v<T, std::vector<std::string>>)
				opt->capture_default_str();
			Entry e;
			e.flag = flag;
			e.opt = opt;
			e.assign = [&var](const json &j) { var = j.get<T>(); };
			e.value = [&var]() { return json(var); };
			entries_.push_back(std::move(e));
			return opt;
		}

		/// Folds the config file under the command line. Returns false when
		/// only the merged settings were asked for.
		bool resolve()
		{
			if (!config_path_.empty())
			{
				std::ifstream in(config_path_);
				if (!in)
					throw IoError("cannot open config file " + config_path_);
				json j;
				try
				{
					j = json::parse(in);
				}
				catch (const json::exception &e)
				{
					throw ParseError(config_path_ + ": " + e.what());
				}
				if (!j.is_object())
					throw ConfigError(config_path_ + ": expected a JSON object");
				for (auto it = j.begin(); it != j.end(); ++it)
				{
					auto e = std::find_if(entries_.begin(), entries_.end(), [&](const Entry &x) { return key_of(x.flag) == it.key(); });
					if (e == entries_.end())
						throw ConfigError(config_path_ + ": unknown key '" + it.key() + "' for " + app_->get_name());
					if (e->opt->count() > 0)
					{
						spdlog::info("--{} on the command line overrides '{}' from {}", e->flag, it.key(), config_path_);
						continue;
					}
					try
					{
						e->assign(it.value());
					}
					catch (const json::exception &)
					{
						throw ConfigError(config_path_ + ": bad value for '" + it.key() + "'");
					}
				}
			}
			if (dump_)
			{
				json out = json::object();
				for (const Entry &e : entries_)
					out[key_of(e.flag)] = e.value();
				std::cout << out.dump(2) << "\n";
				return false;
			}
			return true;
		}

		/// Rejects an empty value for a flag the subcommand cannot run without.
		void need(const std::string &flag, const std::string &value) const
		{
			if (value.empty())
				throw CLI::RequiredError("--" + flag);
		}

	private:
		struct Entry
		{
			std::string flag;
			CLI::Option *opt = nullptr;
			std::function<void(const json &)> assign;
			std::function<json()> value;
		};

		CLI::App *app_;
		std::string config_path_;
		bool dump_ = false;
		std::vector<Entry> entries_;
	};

	struct Settings
	{
		std::string mesh, out, material = "pla", materials;
		double scale = 1.0;
		double voxel_size = 0.0;
		double safety_lambda = 0.2;

		// drop test
		double drop_height = 1.5;
		double contact_depth = SimConfig{}.contact_depth;
		double sim_duration = SimConfig{}.duration;
		double damping = SimConfig{}.damping;
		int threads = 1;
		std::string trace;

		// style
		std::uint64_t seed = 0;
		double amplitude = StyleConfig{}.amplitude;
		double frequency = StyleConfig{}.frequency;
		int octaves = StyleConfig{}.octaves;
		int iterations = StyleConfig{}.iterations;
		double per_iter_cap = StyleConfig{}.per_iter_cap;

		// loop
		std::string control = "exponential", schedule = "stress";
		int sim_budget = ScheduleConfig{}.sim_budget;
		double geometry_fraction = ScheduleConfig{}.geometry_fraction;
		double stress_floor = ScheduleConfig{}.stress_floor;

		SimConfig sim() const
		{
			SimConfig s;
			s.drop_height = drop_height;
			s.contact_depth = contact_depth;
			s.duration = sim_duration;
			s.damping = damping;
			s.threads = threads;
			if (!trace.empty())
				s.trace_path = trace;
			return s;
		}

		StyleConfig style() const
		{
			StyleConfig s;
			s.seed = seed;
			s.amplitude = amplitude;
			s.frequency = frequency;
			s.octaves = octaves;
			s.iterations = iterations;
			s.per_iter_cap = per_iter_cap;
			return s;
		}

		PipelineConfig pipeline() const
		{
			PipelineConfig cfg;
			cfg.style = style();
			cfg.sim = sim();
			cfg.control.strategy = parse_control_strategy(control);
			cfg.schedule.strategy = parse_schedule_strategy(schedule);
			cfg.schedule.sim_budget = sim_budget;
			cfg.schedule.geometry_fraction = geometry_fraction;
			cfg.schedule.stress_floor = stress_floor;
			cfg.material = material;
			if (!materials.empty())
				cfg.materials_file = materials;
			cfg.voxel_size = voxel_size;
			cfg.safety_lambda = safety_lambda;
			return cfg;
		}

		Material resolve_material() const
		{
			return material_lookup(material, materials.empty() ? std::nullopt : std::optional<std::filesystem::path>(materials));
		}

		SurfaceMesh load() const
		{
			SurfaceMesh m = load_mesh(mesh);
			if (scale != 1.0)
			{
				if (!(scale > 0.0) || !std::isfinite(scale))
					throw DomainError("--scale must be positive");
				m = scaled(std::move(m), scale);
			}
			m.validate();
			return m;
		}
	};

	void add_mesh_flags(FlagSet &f, Settings &s, const std::string &out_help)
	{
		f.add("mesh", s.mesh, "input surface mesh (.obj or .ply)");
		f.add("out", s.out, out_help);
		f.add("scale", s.scale, "multiply coordinates by this at load (model units to meters)");
	}

	void add_material_flags(FlagSet &f, Settings &s)
	{
		f.add("material", s.material, "material name");
		f.add("materials", s.materials, "JSON material table extending the built-in one");
		f.add("safety-lambda", s.safety_lambda, "critical stress as a fraction of the yield strength")->check(CLI::Range(0.0, 1.0));
	}

	void add_sim_flags(FlagSet &f, Settings &s)
	{
		f.add("voxel-size", s.voxel_size, "tet lattice spacing in meters; 0 = bbox diagonal / 40");
		f.add("drop-height", s.drop_height, "drop height in meters");
		f.add("contact-depth", s.contact_depth, "ground penetration that balances gravity, meters");
		f.add("sim-duration", s.sim_duration, "seconds simulated after first contact");
		f.add("damping", s.damping, "mass-proportional damping, 1/s");
		f.add("threads", s.threads, "worker threads for force assembly")->check(CLI::PositiveNumber);
		f.add("trace", s.trace, "binary stress trace of the last simulation");
	}

	void add_style_flags(FlagSet &f, Settings &s)
	{
		f.add("seed", s.seed, "style noise seed");
		f.add("amplitude", s.amplitude, "target offset amplitude, fraction of the bbox diagonal");
		f.add("frequency", s.frequency, "noise cycles per bbox diagonal");
		f.add("octaves", s.octaves, "noise octaves");
		f.add("iterations", s.iterations, "stylization iterations");
		f.add("per-iter-cap", s.per_iter_cap, "largest step per iteration, fraction of the bbox diagonal");
	}

	void add_loop_flags(FlagSet &f, Settings &s, bool with_strategies)
	{
		if (with_strategies)
		{
			f.add("control", s.control, "none, linear, exponential or frozen");
			f.add("schedule", s.schedule, "linear-temporal, quadratic-temporal, geometry or stress");
		}
		f.add("sim-budget", s.sim_budget, "simulations for the temporal schedules");
		f.add("geometry-fraction", s.geometry_fraction, "trigger fraction of local thickness");
		f.add("stress-floor", s.stress_floor, "smallest stress scaling of the trigger thresholds");
	}

	std::filesystem::path sibling(const std::string &out, const std::string &suffix)
	{
		std::filesystem::path p(out);
		return p.parent_path() / (p.stem().string() + suffix);
	}

	void write_json(const std::filesystem::path &path, const json &j)
	{
		std::ofstream f(path, std::ios::binary);
		if (!f)
			throw IoError("cannot write " + path.string());
		f << j.dump(2) << "\n";
	}

	Correspondence mesh_for_simulation(const SurfaceMesh &mesh, double voxel_size, TetMesh &tm)
	{
		const double h = voxel_size > 0.0 ? voxel_size : bbox_diagonal(mesh) / 40.0;
		tm = snap_boundary_to_surface(voxel_tetrahedralize(mesh, h), mesh, h);
		return build_correspondence(mesh, tm);
	}

	std::vector<std::string> split_list(const std::vector<std::string> &items)
	{
		std::vector<std::string> out;
		for (const std::string &item : items)
		{
			std::size_t start = 0;
			while (start <= item.size())
			{
				const std::size_t comma = item.find(',', start);
				const std::string part = item.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
				if (!part.empty())
					out.push_back(part);
				if (comma == std::string::npos)
					break;
				start = comma + 1;
			}
		}
		return out;
	}

	int cmd_tetmesh(Settings &s)
	{
		const SurfaceMesh mesh = s.load();
		TetMesh tm;
		const Correspondence corr = mesh_for_simulation(mesh, s.voxel_size, tm);
		const std::filesystem::path base(s.out);
		save_tetgen(tm, base.string() + ".node", base.string() + ".ele");
		std::cout << tm.num_nodes() << " nodes, " << tm.num_tets() << " tets, volume " << tm.total_volume()
				  << " (surface " << enclosed_volume(mesh) << "), max match distance " << corr.max_match_distance << "\n";
		return 0;
	}

	int cmd_simulate(Settings &s, const std::string &stress_out)
	{
		const SurfaceMesh mesh = s.load();
		const Material mat = s.resolve_material();
		const FailureCriterion fc = FailureCriterion::make(mat, s.safety_lambda);
		TetMesh tm;
		const Correspondence corr = mesh_for_simulation(mesh, s.voxel_size, tm);
		const SimConfig sim = s.sim();
		sim.validate();
		StressField sf = drop_test(tm, mat, sim);
		sf.per_vertex_vm = element_to_vertex_stress(sf, tm, corr);
		const NormalizedStress sn = normalized_stress(sf.per_vertex_vm, fc.sigma_c);

		SurfaceMesh colored = mesh;
		colored.colors = heatmap_colors(sn);
		save_colored_mesh(colored, s.out);

		const Verdict v = viability_verdict(sf.per_vertex_vm, mat);
		const std::filesystem::path json_path = stress_out.empty() ? sibling(s.out, ".stress.json") : std::filesystem::path(stress_out);
		json j;
		j["version"] = 1;
		j["units"] = "Pa";
		j["material"] = mat.name;
		j["sigma_c"] = fc.sigma_c;
		j["tets"] = tm.num_tets();
		j["max_vertex_stress"] = v.max_stress;
		j["worst_vertex"] = v.worst_vertex;
		j["vertex_von_mises"] = sf.per_vertex_vm;
		j["element_max_von_mises"] = sf.per_element_max_vm;
		write_json(json_path, j);
		std::cout << "stress: " << json_path.string() << "\n"
				  << "mesh: " << s.out << "\n"
				  << to_string(v.viability) << ": max " << v.max_stress << " Pa at vertex " << v.worst_vertex
				  << " (sigma_c " << fc.sigma_c << " Pa, yield " << mat.yield_strength << " Pa)\n";
		return 0;
	}

	int cmd_analyze(Settings &s, const std::string &stress_path)
	{
		std::ifstream in(stress_path);
		if (!in)
			throw IoError("cannot open stress file " + stress_path);
		std::vector<double> vm;
		try
		{
			const json j = json::parse(in);
			vm = j.at("vertex_von_mises").get<std::vector<double>>();
		}
		catch (const json::exception &e)
		{
			throw ParseError(stress_path + ": " + e.what());
		}
		if (vm.empty())
			throw EmptyMesh(stress_path + ": no vertex stresses");
		const Material mat = s.resolve_material();
		const FailureCriterion fc = FailureCriterion::make(mat, s.safety_lambda);
		const Verdict v = viability_verdict(vm, mat);
		const NormalizedStress sn = normalized_stress(vm, fc.sigma_c);
		const auto critical = std::count_if(sn.begin(), sn.end(), [](double x) { return x >= 1.0; });
		std::cout << to_string(v.viability) << ": max " << v.max_stress << " Pa at vertex " << v.worst_vertex
				  << " (yield " << mat.yield_strength << " Pa, " << critical << " of " << vm.size()
				  << " vertices at or above sigma_c " << fc.sigma_c << " Pa)\n";
		if (!s.out.empty())
		{
			json j;
			j["verdict"] = to_string(v.viability);
			j["max_stress"] = v.max_stress;
			j["worst_vertex"] = v.worst_vertex;
			j["yield_strength"] = mat.yield_strength;
			j["sigma_c"] = fc.sigma_c;
			j["critical_vertices"] = critical;
			j["s_norm"] = sn.values;
			write_json(s.out, j);
		}
		return 0;
	}

	int cmd_thickness(Settings &s, const std::string &stats_out)
	{
		const SurfaceMesh mesh = s.load();
		const ThicknessResult r = local_thickness_detailed(mesh);
		const std::vector<double> &t = r.thickness.values;
		const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
		std::vector<double> sorted = t;
		std::sort(sorted.begin(), sorted.end());
		double mean = 0.0;
		for (double x : t)
			mean += x;
		mean /= static_cast<double>(t.size());

		// thin is red
		SurfaceMesh colored = mesh;
		colored.colors.resize(t.size());
		const double span = *hi - *lo;
		for (std::size_t v = 0; v < t.size(); ++v)
		{
			const double thin = span > 0.0 ? 1.0 - (t[v] - *lo) / span : 0.0;
			const auto c = heatmap_color(thin);
			colored.colors[v] = Vec3(c[0], c[1], c[2]);
		}
		save_colored_mesh(colored, s.out);

		json j;
		j["min"] = *lo;
		j["max"] = *hi;
		j["mean"] = mean;
		j["median"] = sorted[sorted.size() / 2];
		j["ray_fallbacks"] = r.ray_fallbacks;
		j["thickness"] = t;
		const std::filesystem::path path = stats_out.empty() ? sibling(s.out, ".thickness.json") : std::filesystem::path(stats_out);
		write_json(path, j);
		std::cout << "thickness min " << *lo << " max " << *hi << " mean " << mean << "\nstats: " << path.string() << "\nmesh: " << s.out << "\n";
		return 0;
	}

	int cmd_stylize(Settings &s)
	{
		SurfaceMesh mesh = s.load();
		const StyleConfig cfg = s.style();
		cfg.validate();
		StyleTarget target = style_field(mesh, cfg);
		for (int i = 1; i <= cfg.iterations; ++i)
		{
			const DisplacementField d = displacement_step(target, i, cfg);
			mesh = apply_displacement(mesh, d, vertex_normals(mesh));
			for (std::size_t v = 0; v < d.size(); ++v)
				target.achieved[v] += d[v];
		}
		save_colored_mesh(mesh, s.out);
		std::cout << "mesh: " << s.out << "\nattainment " << style_attainment(target) << "\n";
		return 0;
	}

	int cmd_run(Settings &s, const std::string &mesh_out)
	{
		const SurfaceMesh mesh = s.load();
		const PipelineResult res = run_pipeline(mesh, s.pipeline());
		const std::string report_path = s.out.empty() ? "report.json" : s.out;
		std::ofstream(report_path, std::ios::binary) << report_to_string(res.report);
		const std::filesystem::path mpath = mesh_out.empty() ? sibling(report_path, ".ply") : std::filesystem::path(mesh_out);
		save_colored_mesh(res.mesh, mpath);
		const RunReport &r = res.report;
		std::cout << "report: " << report_path << "\nmesh: " << mpath.string() << "\n"
				  << to_string(r.verdict) << ": max " << r.max_stress << " Pa (sigma_c " << r.sigma_c << " Pa, yield "
				  << r.yield_strength << " Pa), " << r.sim_count << " simulations, attainment " << r.style_attainment << "\n";
		return 0;
	}

	int cmd_evaluate(Settings &s, const std::vector<std::string> &meshes, const std::vector<std::uint64_t> &seeds,
					 const std::vector<std::string> &controls, const std::vector<std::string> &schedules,
					 const std::string &cells_out, const std::string &reports_dir, int jobs)
	{
		std::vector<NamedMesh> named;
		for (const std::string &m : meshes)
		{
			Settings one = s;
			one.mesh = m;
			named.push_back({std::filesystem::path(m).stem().string(), one.load()});
		}
		BatchGrid grid;
		grid.seeds = seeds.empty() ? std::vector<std::uint64_t>{s.seed} : seeds;
		if (!controls.empty())
		{
			grid.controls.clear();
			for (const std::string &c : split_list(controls))
				grid.controls.push_back(parse_control_strategy(c));
		}
		if (!schedules.empty())
		{
			grid.schedules.clear();
			for (const std::string &c : split_list(schedules))
				grid.schedules.push_back(parse_schedule_strategy(c));
		}
		grid.concurrent_cells = jobs;
		PipelineConfig base = s.pipeline();
		// the grid sets these per cell; keep the base valid whatever the flags said
		base.control.strategy = grid.controls.front();
		base.schedule.strategy = grid.schedules.front();
		base.validate();

		const std::vector<BatchCell> cells = batch_evaluate(named, grid, base);
		const std::vector<AggregateRow> rows = aggregate(cells, grid);
		const std::string out = s.out.empty() ? "aggregate.csv" : s.out;
		{
			std::ofstream f(out, std::ios::binary);
			if (!f)
				throw IoError("cannot write " + out);
			write_aggregate_csv(rows, f);
		}
		if (!cells_out.empty())
		{
			std::ofstream f(cells_out, std::ios::binary);
			write_cells_csv(cells, f);
		}
		std::size_t failed = 0;
		for (const BatchCell &c : cells)
		{
			failed += !c.report;
			if (c.report && !reports_dir.empty())
			{
				std::filesystem::create_directories(reports_dir);
				const std::string name = c.mesh + "_s" + std::to_string(c.seed) + "_" + to_string(c.control) + "_" + to_string(c.schedule) + ".json";
				std::ofstream(std::filesystem::path(reports_dir) / name, std::ios::binary) << report_to_string(*c.report);
			}
		}
		std::cout << "aggregate: " << out << "\n" << cells.size() << " runs, " << failed << " failed, " << rows.size() << " aggregate rows\n";
		return 0;
	}
} // namespace

int main(int argc, char **argv)
{
	spdlog::set_default_logger(spdlog::stderr_color_st("dropstyle"));
	spdlog::set_pattern("[%l] %v");

	CLI::App app{"dropstyle: stylize meshes under a simulated drop test"};
	app.require_subcommand(1);
	bool quiet = false, verbose = false;
	app.add_flag("-q,--quiet", quiet, "only warnings and errors");
	app.add_flag("-v,--verbose", verbose, "debug output");

	Settings s;
	std::map<std::string, std::unique_ptr<FlagSet>> flags;
	auto sub = [&](const std::string &name, const std::string &help) {
		CLI::App *c = app.add_subcommand(name, help);
		flags[name] = std::make_unique<FlagSet>(c);
		return std::pair<CLI::App *, FlagSet &>{c, *flags[name]};
	};

	std::string stress_out, stats_out, stress_in, mesh_out, cells_out, reports_dir;
	std::vector<std::string> meshes, controls, schedules;
	std::vector<std::uint64_t> seeds;
	int jobs = 1;

	auto [tetmesh, f_tet] = sub("tetmesh", "voxel tetrahedralization, written as TetGen .node/.ele");
	add_mesh_flags(f_tet, s, "output base path; .node and .ele are appended");
	f_tet.add("voxel-size", s.voxel_size, "lattice spacing in meters; 0 = bbox diagonal / 40");

	auto [simulate, f_sim] = sub("simulate", "drop test: heatmap mesh plus stress JSON");
	add_mesh_flags(f_sim, s, "heatmap mesh (.ply or .obj)");
	add_material_flags(f_sim, s);
	add_sim_flags(f_sim, s);
	f_sim.add("stress-out", stress_out, "stress JSON (default: next to --out)");

	auto [analyze, f_an] = sub("analyze", "verdict for a stress JSON");
	f_an.add("stress", stress_in, "stress JSON written by simulate");
	add_material_flags(f_an, s);
	f_an.add("out", s.out, "optional JSON with the verdict and normalized stress");

	auto [thickness, f_th] = sub("thickness", "local thickness: heatmap mesh plus JSON stats");
	add_mesh_flags(f_th, s, "heatmap mesh, thin in red");
	f_th.add("stats-out", stats_out, "stats JSON (default: next to --out)");

	auto [stylize, f_st] = sub("stylize", "stylize without any simulation");
	add_mesh_flags(f_st, s, "stylized mesh");
	add_style_flags(f_st, s);

	auto [run, f_run] = sub("run", "the full stylization loop");
	add_mesh_flags(f_run, s, "report JSON (default report.json)");
	f_run.add("mesh-out", mesh_out, "stylized heatmap mesh (default: next to the report, .ply)");
	add_material_flags(f_run, s);
	add_sim_flags(f_run, s);
	add_style_flags(f_run, s);
	add_loop_flags(f_run, s, true);

	auto [evaluate, f_ev] = sub("evaluate", "batch grid over meshes, seeds, controls and schedules");
	f_ev.add("mesh", meshes, "input meshes")->expected(1, -1);
	f_ev.add("out", s.out, "aggregate CSV (default aggregate.csv)");
	f_ev.add("scale", s.scale, "multiply coordinates by this at load");
	f_ev.add("seeds", seeds, "style seeds (default: --seed)")->expected(1, -1);
	f_ev.add("controls", controls, "control strategies (default: all four)")->expected(1, -1);
	f_ev.add("schedules", schedules, "schedules (default: all four)")->expected(1, -1);
	f_ev.add("cells-out", cells_out, "per-run CSV");
	f_ev.add("reports-dir", reports_dir, "directory for every run's report JSON");
	f_ev.add("jobs", jobs, "runs in flight at once")->check(CLI::PositiveNumber);
	add_material_flags(f_ev, s);
	add_sim_flags(f_ev, s);
	add_style_flags(f_ev, s);
	add_loop_flags(f_ev, s, false);

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::CallForHelp &e)
	{
		return app.exit(e);
	}
	catch (const CLI::CallForAllHelp &e)
	{
		return app.exit(e);
	}
	catch (const CLI::ParseError &e)
	{
		app.exit(e);
		return exit_usage;
	}
	spdlog::set_level(quiet ? spdlog::level::warn : verbose ? spdlog::level::debug : spdlog::level::info);

	try
	{
		CLI::App *chosen = app.get_subcommands().front();
		FlagSet &f = *flags.at(chosen->get_name());
		if (!f.resolve())
			return 0;
		const std::string name = chosen->get_name();
		if (name == "analyze")
		{
			f.need("stress", stress_in);
			return cmd_analyze(s, stress_in);
		}
		if (name == "evaluate")
		{
			if (meshes.empty())
				throw CLI::RequiredError("--mesh");
			return cmd_evaluate(s, meshes, seeds, controls, schedules, cells_out, reports_dir, jobs);
		}
		f.need("mesh", s.mesh);
		if (name != "run")
			f.need("out", s.out);
		if (name == "tetmesh")
			return cmd_tetmesh(s);
		if (name == "simulate")
			return cmd_simulate(s, stress_out);
		if (name == "thickness")
			return cmd_thickness(s, stats_out);
		if (name == "stylize")
			return cmd_stylize(s);
		return cmd_run(s, mesh_out);
	}
	catch (const CLI::ParseError &e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return exit_usage;
	}
	catch (const std::exception &e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return exit_domain;
	}
}
