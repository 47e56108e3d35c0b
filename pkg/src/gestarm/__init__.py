"""Glove-gesture teleoperation: tracking, fuzzy control, arm service, simulator."""

__version__ = "0.1.0"

from .frameio import (
    DEFAULT_LED_CENTERS,
    GrayFrame,
    SynthScene,
    load_pgm,
    random_scene,
    save_pgm,
    synth_frame,
)
from .vision import (
    BinaryFrame,
    Circle,
    Displacement,
    HandCenter,
    displacement,
    hand_center,
    hough_circles,
    normalize_and_threshold,
    select_fingertips,
)
from .fuzzy import (
    ControllerState,
    FuzzySet,
    RuleBase,
    ServoCommand,
    default_rule_base,
    infer_axis,
    load_rule_bases,
    membership,
    smooth_z,
    step_controller,
)
from .arm import (
    ArmGeometry,
    ArmState,
    JointTorques,
    SerialFrame,
    apply_command,
    decode_serial,
    encode_serial,
    forward_kinematics,
    static_torque,
)
from .wire import WireMessage, decode_wire, encode_wire
from .client import ClientFsmState, PipelineConfig, client_step
from .server import ArmService, GatewayServer, TeleopServer

__all__ = [
    "DEFAULT_LED_CENTERS",
    "GrayFrame",
    "SynthScene",
    "load_pgm",
    "random_scene",
    "save_pgm",
    "synth_frame",
    "BinaryFrame",
    "Circle",
    "Displacement",
    "HandCenter",
    "displacement",
    "hand_center",
    "hough_circles",
    "normalize_and_threshold",
    "select_fingertips",
    "ControllerState",
    "FuzzySet",
    "RuleBase",
    "ServoCommand",
    "default_rule_base",
    "infer_axis",
    "load_rule_bases",
    "membership",
    "smooth_z",
    "step_controller",
    "ArmGeometry",
    "ArmState",
    "JointTorques",
    "SerialFrame",
    "apply_command",
    "decode_serial",
    "encode_serial",
    "forward_kinematics",
    "static_torque",
    "WireMessage",
    "decode_wire",
    "encode_wire",
    "ClientFsmState",
    "PipelineConfig",
    "client_step",
    "ArmService",
    "GatewayServer",
    "TeleopServer",
]
