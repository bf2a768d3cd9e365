from fspcr.models.model import Method, SpcrModel, beta_hat, predict
from fspcr.models.spcr import FitConfig, SmoothedSpcr, Spcr, SpcrA, UnpenalizedSpcr
from fspcr.models.baselines import Superpc, SuperpcConfig, Upcr, UpcrConfig
from fspcr.models.methods import METHODS, available_methods, method_class, method_from_config, method_from_name
