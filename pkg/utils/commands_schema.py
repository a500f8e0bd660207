COMMANDS_SCHEMA = [
    {
        "name": "generate",
        "description": "Generate a tree maze and write it in the maze file format.",
        "arguments": [
            {"flags": ["--grid"], "type": "string", "help": "Grid maze of WxH cells (e.g. 10x10)"},
            {"flags": ["--geometric"], "type": "integer", "help": "Geometric maze with this many nodes"},
            {"flags": ["--region"], "type": "string", "default": "100x100",
             "help": "Region WxH for geometric mazes"},
            {"flags": ["--seed"], "type": "integer", "default": 0, "help": "Maze seed"},
            {"flags": ["--out"], "type": "string", "help": "Output file (prints to stdout when omitted)"},
        ],
    },
    {
        "name": "run",
        "description": "Run a single trial and print its status, makespan and average fuel.",
        "arguments": [
            {"flags": ["--maze"], "type": "string", "help": "Maze file"},
            {"flags": ["--grid"], "type": "string", "help": "Generate a WxH grid maze instead of reading a file"},
            {"flags": ["--maze-seed"], "type": "integer", "default": 0, "help": "Seed for a generated maze"},
            {"flags": ["--n"], "type": "integer", "required": True, "help": "Number of agents"},
            {"flags": ["--strategy"], "type": "string", "default": "mamt",
             "help": "mamt, naive, global or fullknowledge"},
            {"flags": ["--solver"], "type": "string", "default": "dfs", "help": "dfs, bfs or random"},
            {"flags": ["--seed"], "type": "integer", "default": 0, "help": "Trial seed"},
            {"flags": ["--step-cap"], "type": "integer", "help": "Step cap (default from MAMT_STEP_CAP)"},
            {"flags": ["--trace"], "type": "string", "help": "Write the event trace to this file"},
            {"flags": ["--check"], "type": "boolean", "help": "Check invariants after every step"},
        ],
    },
    {
        "name": "batch",
        "description": "Run a sweep and write the per-trial CSV (and optional SVG plots).",
        "arguments": [
            {"flags": ["--config"], "type": "string", "help": "Flat key = value sweep file; flags override it"},
            {"flags": ["--maze-sizes"], "type": "string", "help": "Comma-separated WxH sizes"},
            {"flags": ["--n"], "type": "string", "help": "Comma-separated agent counts"},
            {"flags": ["--strategies"], "type": "string", "help": "Comma-separated strategies"},
            {"flags": ["--solvers"], "type": "string", "help": "Comma-separated solvers"},
            {"flags": ["--trials"], "type": "integer", "help": "Trials per cell"},
            {"flags": ["--base-seed"], "type": "integer", "help": "Base seed for all derived seeds"},
            {"flags": ["--step-cap"], "type": "integer", "help": "Step cap per trial"},
            {"flags": ["--out"], "type": "string", "help": "CSV output path"},
            {"flags": ["--plot"], "type": "string", "help": "Directory for SVG plots"},
            {"flags": ["--threads"], "type": "integer", "help": "Worker processes (default from MAMT_THREADS)"},
        ],
    },
    {
        "name": "replay",
        "description": "Render the frames of a recorded trace.",
        "arguments": [
            {"flags": ["trace"], "type": "string", "help": "Trace file written by run --trace"},
            {"flags": ["--format"], "type": "string", "default": "ascii", "choices": ["ascii", "svg"],
             "help": "ascii frames on stdout or one SVG per frame"},
            {"flags": ["--out"], "type": "string", "default": "frames", "help": "Directory for SVG frames"},
        ],
    },
    {
        "name": "validate",
        "description": "Check a maze file and report the first problem with its line and field.",
        "arguments": [
            {"flags": ["maze"], "type": "string", "help": "Maze file"},
        ],
    },
]
