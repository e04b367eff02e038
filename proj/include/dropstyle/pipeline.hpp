#pragma once

#include <dropstyle/control.hpp>
#include <dropstyle/failure.hpp>
#include <dropstyle/schedule.hpp>
#include <dropstyle/simulate.hpp>
#include <dropstyle/stylize.hpp>
#include <dropstyle/thickness.hpp>

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dropstyle
{
	struct PipelineConfig
	{
		StyleConfig style;
		ControlConfig control;
		ScheduleConfig schedule;
		SimConfig sim;
		std::string material = "pla";
		std::optional<std::filesystem::path> materials_file;
		std::optional<Material> material_override; ///< bypasses the lookup when set
		double voxel_size = 0.0;                   ///< 0 picks bbox_diagonal / 40 of the input mesh
		bool snap_boundary = true;
		double safety_lambda = 0.2;

		void validate() const;
		Material resolve_material() const;
	};

	/// One simulation of the loop, iteration 0 being the unstyled model.
	struct SimRecord
	{
		int iteration = 0;
		std::string reason; ///< baseline, schedule, trigger or final
		std::size_t tets = 0;
		double max_vertex_stress = 0.0;
		double max_element_stress = 0.0;
	};

	struct PhaseTimes
	{
		double stylize = 0.0;
		double mesh = 0.0;
		double simulate = 0.0;
		double thickness = 0.0;
		double total = 0.0;
	};

	struct RunReport
	{
		Viability verdict = Viability::viable;
		double max_stress = 0.0; ///< Pa, final model
		int worst_vertex = 0;
		double baseline_max_stress = 0.0;
		double sigma_c = 0.0;
		double yield_strength = 0.0;
		int sim_count = 0;      ///< every simulation, baseline included
		int loop_sim_count = 0; ///< simulations after the baseline
		std::vector<int> scheduled_iterations;
		std::vector<SimRecord> sims;
		PhaseTimes wall_time;
		double style_attainment = 0.0;
		std::vector<double> final_s_norm;
		nlohmann::json config_echo;
	};

	struct PipelineResult
	{
		SurfaceMesh mesh; ///< stylized, colored by the final normalized stress
		RunReport report;
		StyleTarget style; ///< target and achieved displacement per vertex
	};

	PipelineResult run_pipeline(const SurfaceMesh &mesh, const PipelineConfig &cfg);

	/// Blue at 0 through green to red at 1; darker red up to 1.5, where it saturates.
	std::array<double, 3> heatmap_color(double s_norm);
	std::vector<Vec3> heatmap_colors(const NormalizedStress &sn);

	nlohmann::json to_json(const PipelineConfig &cfg);
	nlohmann::json to_json(const RunReport &report);
	/// Pretty JSON with wall times intact.
	std::string report_to_string(const RunReport &report);
} // namespace dropstyle
