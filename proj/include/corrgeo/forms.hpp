#pragma once

// Specifications for the scalar product on a reference system and for
// the pointwise Hermitian form that feeds the local correlation map.

#include <string>
#include <vector>

#include "corrgeo/errors.hpp"

namespace corrgeo {

struct ScalarProductSpec {
    enum class Kind { L2, SobolevH1, SobolevHk, WeightedCustom };

    Kind kind = Kind::L2;
    // SobolevHk only: derivative order and one weight per order 0..k.
    // Jets carry first derivatives, so only k <= 1 is evaluable.
    int k = 1;
    std::vector<double> order_weights;
    // WeightedCustom only.
    std::string kernel_id;

    static ScalarProductSpec l2() { return {Kind::L2}; }
    static ScalarProductSpec sobolev_h1() { return {Kind::SobolevH1}; }
    static ScalarProductSpec sobolev_hk(int k, std::vector<double> w) {
        return {Kind::SobolevHk, k, std::move(w)};
    }
    static ScalarProductSpec weighted_custom(std::string id) {
        return {Kind::WeightedCustom, 1, {}, std::move(id)};
    }
};

struct LocalFormSpec {
    enum class Kind {
        MetricOnFiber,
        GradientForm,
        PointwiseSesquilinear,
        EpsilonAveraged
    };

    Kind kind = Kind::PointwiseSesquilinear;
    // EpsilonAveraged only: the averaged inner form and ball radius.
    Kind inner = Kind::PointwiseSesquilinear;
    double epsilon = 0.0;

    static LocalFormSpec metric_on_fiber() { return {Kind::MetricOnFiber}; }
    static LocalFormSpec gradient_form() { return {Kind::GradientForm}; }
    static LocalFormSpec pointwise() { return {Kind::PointwiseSesquilinear}; }
    static LocalFormSpec epsilon_averaged(Kind inner, double eps) {
        if (eps <= 0)
            throw InvalidArgs("epsilon must be positive");
        if (inner == Kind::EpsilonAveraged)
            throw InvalidArgs("epsilon averaging cannot be nested");
        return {Kind::EpsilonAveraged, inner, eps};
    }
};

} // namespace corrgeo
