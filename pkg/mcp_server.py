"""
MCP Server for heatsym

Exposes the symmetry checks, the boundary filter, the similarity reduction
and the analytic/numeric comparison via the Model Context Protocol.
"""

from mcp.server import Server
from mcp.types import Tool, TextContent
import mcp.server.stdio
import json

from analytic import ThermalConfig
from tools import (
    verify_algebra,
    filter_problem,
    reduce_problem,
    evaluate_solution,
    run_compare,
    generate_report
)
from tools.config_tool import config_from_mapping, load_config


# Initialize MCP server
server = Server("heatsym")

_PROBLEM_SCHEMA = {
    "type": "string",
    "enum": ["ibvp1", "ibvp2"],
    "description": "ibvp1: constant surface temperature; ibvp2: constant surface heat flux"
}

_THERMAL_SCHEMA = {
    "type": "object",
    "description": "Material and drivers (optional): kcond, rho, c_heat, alpha, T_i, T_s, q0pp, L",
    "additionalProperties": {"type": "number"}
}


@server.list_tools()
async def list_tools() -> list[Tool]:
    """List available MCP tools."""
    return [
        Tool(
            name="verify_algebra",
            description="Exactly verify the six heat-equation symmetry generators, the X_inf family and all 15 commutator closures.",
            inputSchema={
                "type": "object",
                "properties": {
                    "format": {
                        "type": "string",
                        "description": "Output: json, plain or markdown (default: json)"
                    }
                }
            }
        ),
        Tool(
            name="filter_problem",
            description="Impose invariance of the boundaries and boundary conditions of a problem; returns the constraint rows on k1..k6 and the admitted operators.",
            inputSchema={
                "type": "object",
                "properties": {
                    "problem": _PROBLEM_SCHEMA
                },
                "required": ["problem"]
            }
        ),
        Tool(
            name="reduce_problem",
            description="Similarity chart, reduced ODE and closed-form solution of a problem, with fitted constants when material data is given.",
            inputSchema={
                "type": "object",
                "properties": {
                    "problem": _PROBLEM_SCHEMA,
                    "thermal": _THERMAL_SCHEMA
                },
                "required": ["problem"]
            }
        ),
        Tool(
            name="evaluate_solution",
            description="Closed-form temperature (K) and Fourier heat flux (W/m^2) at depth x (m) and time t (s).",
            inputSchema={
                "type": "object",
                "properties": {
                    "problem": _PROBLEM_SCHEMA,
                    "x": {"type": "number", "description": "Depth below the surface, m"},
                    "t": {"type": "number", "description": "Time, s (positive)"},
                    "thermal": _THERMAL_SCHEMA
                },
                "required": ["problem", "x", "t"]
            }
        ),
        Tool(
            name="run_compare",
            description="Run the finite-difference solver and compare it with the closed form; writes CSVs and returns per-snapshot errors and the truncation check.",
            inputSchema={
                "type": "object",
                "properties": {
                    "config_path": {
                        "type": "string",
                        "description": "Path to a key = value run file"
                    },
                    "config": {
                        "type": "object",
                        "description": "Run-file keys given inline instead of config_path"
                    },
                    "write": {
                        "type": "boolean",
                        "description": "Write CSV files (default: true)"
                    }
                }
            }
        )
    ]


def _thermal(arguments: dict):
    values = arguments.get("thermal")
    return ThermalConfig(**values) if values else None


@server.call_tool()
async def call_tool(name: str, arguments) -> list[TextContent]:
    """Handle tool execution."""
    arguments = arguments or {}
    try:
        if name == "verify_algebra":
            result = verify_algebra()
            fmt = arguments.get("format", "json")
            if fmt != "json":
                result = generate_report(algebra=result, format=fmt)

        elif name == "filter_problem":
            result = filter_problem(arguments["problem"])

        elif name == "reduce_problem":
            result = reduce_problem(arguments["problem"], _thermal(arguments))

        elif name == "evaluate_solution":
            result = evaluate_solution(
                problem=arguments["problem"],
                x=float(arguments["x"]),
                t=float(arguments["t"]),
                thermal=_thermal(arguments)
            )

        elif name == "run_compare":
            if "config_path" in arguments:
                rc = load_config(arguments["config_path"])
            else:
                rc = config_from_mapping(arguments.get("config", {}))
            result = run_compare(rc, write=arguments.get("write", True))

        else:
            return [TextContent(
                type="text",
                text=f"Unknown tool: {name}"
            )]

        # Return result as JSON
        return [TextContent(
            type="text",
            text=json.dumps(result, indent=2)
        )]

    except Exception as e:
        return [TextContent(
            type="text",
            text=f"Error executing {name}: {str(e)}"
        )]


async def main():
    """Run the MCP server."""
    async with mcp.server.stdio.stdio_server() as (read_stream, write_stream):
        await server.run(
            read_stream,
            write_stream,
            server.create_initialization_options()
        )


if __name__ == "__main__":
    import asyncio
    asyncio.run(main())
