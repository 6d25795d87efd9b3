from arrival_workbench.core import ArrivalInstance, load_instance, parse_instance
from arrival_workbench.exceptions import ArrivalException
from arrival_workbench.solver import decide_all
from arrival_workbench.workbench import Workbench
