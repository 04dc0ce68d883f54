"""Scene-to-tool fabrication and simulated task execution pipeline.

Turns a workspace scene into a tool prompt, obtains a triangle mesh from a
pluggable generator, validates/scales/slices it into printable G-code, then
executes the task in a simulated workspace via a 7D-action control loop,
recording episodes and reporting generalization success rates.
"""

__version__ = "0.1.0"
