#ifndef BHLDP_IO_REPORTS_HPP
#define BHLDP_IO_REPORTS_HPP

#include "bhldp/extremal_flow.hpp"
#include "bhldp/fluid_limit.hpp"
#include "bhldp/large_deviations.hpp"
#include "bhldp/params.hpp"
#include "bhldp/rare_event.hpp"
#include "json.hpp"

namespace bhldp::io {

nlohmann::json report(const ModelParams& p);
nlohmann::json report(const ode::Stats& s);
nlohmann::json report(const StationaryAnalysis& a);
nlohmann::json report(const RegimeSolution& r);
nlohmann::json report(const GInfimum& g);
nlohmann::json report(const ProbeReport& r);
nlohmann::json report(const EstimatorReport& r);
nlohmann::json report(const SlopeReport& r);

}  // namespace bhldp::io

#endif  // BHLDP_IO_REPORTS_HPP
