import pytest

from hopsim import analytic, model, sim
from hopsim.model import Gains, LegGeometry, MotorParams

# Envelope large enough that the ideal-spring oracle command never clips;
# the clamp pipeline stays active so its invariants still hold.
ORACLE_MOTOR = MotorParams(tau_max=2000.0, omega_max=1000.0, R=1.0)


@pytest.fixture(scope="session")
def physical():
    return model.physics_preset("physical")


@pytest.fixture(scope="session")
def paper_literal():
    return model.physics_preset("paper-literal")


@pytest.fixture(scope="session")
def geometry():
    return LegGeometry()


@pytest.fixture(scope="session")
def bundle_physical(physical):
    return model.validate(physical)


@pytest.fixture(scope="session")
def bundle_oracle(physical, geometry):
    return model.validate(physical, ORACLE_MOTOR, Gains(), geometry)


@pytest.fixture(scope="session")
def force_run_1hop(bundle_physical):
    res = sim.run(sim.RunSetup(bundle=bundle_physical, controller="force", hops=1))
    assert res.ok, res.status
    return res


@pytest.fixture(scope="session")
def force_run_3hops(bundle_physical):
    res = sim.run(sim.RunSetup(bundle=bundle_physical, controller="force", hops=3))
    assert res.ok, res.status
    return res


@pytest.fixture(scope="session")
def position_run_1hop(bundle_physical):
    res = sim.run(sim.RunSetup(bundle=bundle_physical, controller="position", hops=1))
    assert res.ok, res.status
    return res


@pytest.fixture(scope="session")
def spring_stance_run(bundle_oracle, physical):
    """Ideal-spring command integrated over one analytic stance window."""
    t_lo, _ = analytic.switch_times(physical)
    res = sim.run(
        sim.RunSetup(
            bundle=bundle_oracle,
            controller="spring",
            duration=t_lo,
            dt=2.5e-4,
            control_rate=4000.0,
        )
    )
    assert res.ok, res.status
    return res
