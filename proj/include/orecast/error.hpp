#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace orecast {

/// Base of every error raised by the library. `code()` is a stable
/// machine-readable identifier used by the CLI and the HTTP service;
/// `field()` names the offending input when one applies.
class Error : public std::runtime_error {
public:
	Error(std::string code, const std::string &message, std::string field = {})
	    : std::runtime_error(message), code_(std::move(code)), field_(std::move(field)) {}

	const std::string &code() const noexcept { return code_; }
	const std::string &field() const noexcept { return field_; }

private:
	std::string code_;
	std::string field_;
};

#define ORECAST_DEFINE_ERROR(Name)                                                                 \
	class Name : public Error {                                                                    \
	public:                                                                                        \
		explicit Name(const std::string &message, std::string field = {})                          \
		    : Error(#Name, message, std::move(field)) {}                                           \
	}

// core-series
ORECAST_DEFINE_ERROR(LengthError);
ORECAST_DEFINE_ERROR(AnchorError);
ORECAST_DEFINE_ERROR(DegenerateError);
ORECAST_DEFINE_ERROR(LagError);

// ingest
ORECAST_DEFINE_ERROR(SchemaError);
ORECAST_DEFINE_ERROR(EncodingError);
ORECAST_DEFINE_ERROR(DuplicateYearError);
ORECAST_DEFINE_ERROR(KError);
ORECAST_DEFINE_ERROR(NoDonorError);
ORECAST_DEFINE_ERROR(EmptySelectionError);
ORECAST_DEFINE_ERROR(MixedUnitError);
ORECAST_DEFINE_ERROR(IOError);

// models
ORECAST_DEFINE_ERROR(ConvergenceError);
ORECAST_DEFINE_ERROR(NoModelError);
ORECAST_DEFINE_ERROR(HorizonError);
ORECAST_DEFINE_ERROR(ParamError);
ORECAST_DEFINE_ERROR(SingularError);

// diagnostics
ORECAST_DEFINE_ERROR(SizeError);
ORECAST_DEFINE_ERROR(ReplicateError);
ORECAST_DEFINE_ERROR(ShortResidualError);

// analytics / pipeline
ORECAST_DEFINE_ERROR(EmptyError);
ORECAST_DEFINE_ERROR(UnknownDepartmentError);
ORECAST_DEFINE_ERROR(SelectionError);

// service
ORECAST_DEFINE_ERROR(BindError);

#undef ORECAST_DEFINE_ERROR

/// Raised when a series is shorter than a model requires. Carries the
/// minimum length so callers can report it.
class TooShortError : public Error {
public:
	TooShortError(const std::string &message, std::size_t required, std::size_t actual)
	    : Error("TooShortError", message), required_(required), actual_(actual) {}

	std::size_t required() const noexcept { return required_; }
	std::size_t actual() const noexcept { return actual_; }

private:
	std::size_t required_;
	std::size_t actual_;
};

} // namespace orecast
