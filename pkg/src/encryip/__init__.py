"""Model IP protection by encrypting the label space with a multi-key PKE scheme."""

from .codec import LabelEncoding, decode_label, encode_label, phi, phi_inv
from .data import (EncryptedDataset, LabeledDataset, VerificationRecord, encrypt_dataset, inject,
                   make_blobs, make_verification_record)
from .deploy import DeploymentHandle, deploy_predict, evaluate, user_decrypt
from .errors import EncryIPError
from .group import GroupParams, gen_params, sample_exponent
from .model import Model, TrainConfig, forward, gradient, loss, train
from .pke import AuthorityState, Ciphertext, PublicKey, SecretKey, add_user, dec, enc, fake, gen, samp_dist
from .verification import ArbitrationContext, finetune_attack, verify_key, verify_leak

__version__ = "0.1.0"
