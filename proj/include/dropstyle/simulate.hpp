#pragma once

#include <dropstyle/material.hpp>
#include <dropstyle/parallel.hpp>
#include <dropstyle/tet.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <vector>

namespace dropstyle
{
	/// Drop-test parameters. The body starts start_gap above a frictionless
	/// penalty plane, already moving at the free-fall impact speed.
	struct SimConfig
	{
		double drop_height = 1.5; ///< m
		double gravity = 9.81;    ///< m/s^2
		Vec3 up = Vec3::UnitZ();  ///< plane normal; gravity acts along -up
		double dt = 0.0;          ///< s; 0 picks dt_safety x the stability bound
		double dt_safety = 0.8;
		double duration = 0.03;   ///< s simulated after first contact
		/// Penalty stiffness per node is m_node * 9.81 / contact_depth, i.e. the
		/// static sag a node would have under its own weight.
		double contact_depth = 1e-4; ///< m
		double damping = 5.0;        ///< mass-proportional, 1/s
		double start_gap = 1e-3;     ///< m
		bool ground_contact = true;
		int substeps = 50; ///< steps per trace frame
		int threads = 1;
		std::optional<std::filesystem::path> trace_path;

		void validate() const;
		/// Contact stiffness per unit node mass, 1/s^2.
		double contact_stiffness_per_mass() const;
	};

	struct StressField
	{
		std::vector<double> per_element_max_vm; ///< Pa, max over all steps
		std::vector<double> per_vertex_vm;      ///< Pa, filled by element_to_vertex_stress
	};

	/// Free-fall speed sqrt(2 g h).
	double impact_velocity(double drop_height, double gravity);

	/// Largest stable explicit step: 0.5 h_min sqrt(rho / (lambda + 2 mu)).
	double stability_bound(const TetMesh &tm, const Material &mat);

	/// Stable neo-Hookean energy density and first Piola stress with the
	/// lambda + mu reparameterization, so F = I is stress free.
	struct NeoHookean
	{
		double mu;
		double lambda_hat;

		explicit NeoHookean(const Material &mat) : mu(mat.lame_mu), lambda_hat(mat.lame_lambda + mat.lame_mu) {}
		NeoHookean(double mu_, double lambda) : mu(mu_), lambda_hat(lambda + mu_) {}

		double energy_density(const Mat3 &F) const;
		Mat3 first_piola(const Mat3 &F) const;
		/// sigma = P F^T / J.
		Mat3 cauchy(const Mat3 &F) const;
	};

	/// sqrt(3/2 s:s) of the deviatoric part. Throws AsymmetryError.
	double element_von_mises(const Mat3 &cauchy);

	/// Explicit symplectic-Euler integrator for a lumped-mass tet body.
	class DropSimulator
	{
	public:
		DropSimulator(const TetMesh &tm, const Material &mat, const SimConfig &cfg);
		~DropSimulator();

		/// Places the body start_gap above the plane with the impact velocity.
		void reset_drop_state();

		void step();
		/// Steps until the configured duration (plus the gap fall) has elapsed.
		void run();

		double dt() const { return dt_; }
		double time() const { return time_; }
		long steps_taken() const { return steps_; }
		std::size_t total_steps() const;

		std::vector<Vec3> &positions() { return x_; }
		std::vector<Vec3> &velocities() { return v_; }
		const std::vector<double> &masses() const { return mass_; }

		/// Elastic forces at the current positions (no gravity/contact/damping).
		std::vector<Vec3> internal_forces() const;

		/// Uses velocities synchronized with the positions (half-step correction).
		double kinetic_energy() const;
		double elastic_energy() const;
		double gravity_energy() const;
		double contact_energy() const;
		double total_energy() const { return kinetic_energy() + elastic_energy() + gravity_energy() + contact_energy(); }

		const std::vector<double> &max_von_mises() const { return max_vm_; }
		/// Von Mises stress of every element at the current positions.
		std::vector<double> current_von_mises() const;

	private:
		void element_forces(std::size_t begin, std::size_t end, bool track_stress);
		void write_trace_header();
		void write_trace_frame();

		const TetMesh &tm_;
		Material mat_;
		SimConfig cfg_;
		NeoHookean model_;
		double dt_ = 0.0;
		double time_ = 0.0;
		long steps_ = 0;
		double plane_ = 0.0;
		double contact_k_ = 0.0;

		std::vector<Vec3> x_, v_;
		std::vector<double> mass_;
		std::vector<Mat3> dm_inv_;
		std::vector<double> rest_volume_;
		std::vector<double> max_vm_;
		std::vector<std::array<Vec3, 4>> tet_forces_;
		std::vector<int> incident_offsets_;
		std::vector<int> incident_; // tet * 4 + local, ascending tet order per node
		std::vector<Vec3> force_;

		std::unique_ptr<WorkerPool> pool_;
		std::ofstream trace_;
	};

	/// Runs the drop test; returns per-element max von Mises only.
	StressField drop_test(const TetMesh &tm, const Material &mat, const SimConfig &cfg);

	/// Node value = max over incident tets; surface vertex value = matched node's value.
	std::vector<double> element_to_vertex_stress(const StressField &sf, const TetMesh &tm, const Correspondence &corr);
} // namespace dropstyle
