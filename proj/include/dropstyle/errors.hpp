#pragma once

#include <stdexcept>
#include <string>

namespace dropstyle
{
	// Every failure raised by the library derives from Error so callers (the CLI
	// in particular) can separate domain errors from programming errors.
	class Error : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

#define DROPSTYLE_ERROR(Name)                  \
	class Name : public Error                  \
	{                                          \
	public:                                    \
		explicit Name(const std::string &what) \
			: Error(#Name ": " + what) {}      \
	}

	DROPSTYLE_ERROR(ParseError);
	DROPSTYLE_ERROR(TopologyError);
	DROPSTYLE_ERROR(IoError);
	DROPSTYLE_ERROR(LengthMismatch);
	DROPSTYLE_ERROR(EmptyMesh);
	DROPSTYLE_ERROR(DomainError);
	DROPSTYLE_ERROR(IncompressibleError);
	DROPSTYLE_ERROR(UnknownMaterial);
	DROPSTYLE_ERROR(OpenMeshError);
	DROPSTYLE_ERROR(ResolutionError);
	DROPSTYLE_ERROR(IndexBaseError);
	DROPSTYLE_ERROR(InstabilityError);
	DROPSTYLE_ERROR(StabilityBoundError);
	DROPSTYLE_ERROR(AsymmetryError);
	DROPSTYLE_ERROR(StaleCorrespondence);
	DROPSTYLE_ERROR(IterOutOfRange);
	DROPSTYLE_ERROR(ThresholdsUninitialized);
	DROPSTYLE_ERROR(DegenerateNormal);
	DROPSTYLE_ERROR(ConfigError);

#undef DROPSTYLE_ERROR

	// Thrown by the pipeline when a stage fails mid-run; keeps the iteration.
	class StageError : public Error
	{
	public:
		StageError(int iteration, const std::string &what)
			: Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}

		int iteration() const { return iteration_; }

	private:
		int iteration_;
	};
} // namespace dropstyle
