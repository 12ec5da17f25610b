#pragma once

#include <stdexcept>
#include <string>

namespace corrgeo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define CORRGEO_DEFINE_ERROR(NAME)                       \
    struct NAME : Error {                                \
        explicit NAME(const std::string& msg)            \
            : Error(std::string(#NAME) + ": " + msg) {}  \
    }

CORRGEO_DEFINE_ERROR(InvalidOperator);
CORRGEO_DEFINE_ERROR(DimMismatch);
CORRGEO_DEFINE_ERROR(NotUnitary);
CORRGEO_DEFINE_ERROR(InvalidArgs);
CORRGEO_DEFINE_ERROR(NumericalFailure);
CORRGEO_DEFINE_ERROR(Undersampled);
CORRGEO_DEFINE_ERROR(AmbiguousSeaCut);
CORRGEO_DEFINE_ERROR(MissingJet);
CORRGEO_DEFINE_ERROR(InvalidDiffeo);
CORRGEO_DEFINE_ERROR(DegenerateSystem);
CORRGEO_DEFINE_ERROR(EmptyBall);
CORRGEO_DEFINE_ERROR(FormNotCovariant);
CORRGEO_DEFINE_ERROR(Unsupported);
CORRGEO_DEFINE_ERROR(InvalidEmbedding);
CORRGEO_DEFINE_ERROR(UnknownKernel);
CORRGEO_DEFINE_ERROR(ParseError);

#undef CORRGEO_DEFINE_ERROR

} // namespace corrgeo
