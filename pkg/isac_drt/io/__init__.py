# flake8: noqa

from .exceptions import ConfigFieldError, TableFormatError
from .scenario_config import load_comm_channel, load_scenario, scenario_from_dict
from .tables import format_table, read_design_grid, read_table, write_table
