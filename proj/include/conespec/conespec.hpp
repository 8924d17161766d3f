/**
 * @file conespec.hpp
 * @brief Umbrella header: the whole spectral laboratory in one include.
 */
#pragma once

#include "conespec/errors.hpp"
#include "conespec/config.hpp"
#include "conespec/parallel.hpp"
#include "conespec/quadrature.hpp"
#include "conespec/tridiagonal.hpp"
#include "conespec/bessel.hpp"
#include "conespec/cross_section.hpp"
#include "conespec/channel_model.hpp"
#include "conespec/radial_solver.hpp"
#include "conespec/finite_difference.hpp"
#include "conespec/spectra.hpp"
#include "conespec/report_io.hpp"
#include "conespec/convergence_lab.hpp"
#include "conespec/topology.hpp"
#include "conespec/verify.hpp"
#include "conespec/run_config.hpp"
